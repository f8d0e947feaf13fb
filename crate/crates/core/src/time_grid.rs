//! Time grids graded toward `t = 0` and trajectories sampled on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Parameters of a graded grid on `[0, T]`, relative to `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// Smallest positive node as a fraction of `T`.
    pub t_min_fraction: f64,
    /// Geometric nodes per decade.
    pub nodes_per_decade: usize,
    /// Largest allowed step as a fraction of `T`.
    pub max_step_fraction: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            t_min_fraction: 1e-6,
            nodes_per_decade: 24,
            max_step_fraction: 0.02,
        }
    }
}

impl GridSpec {
    /// Denser grading used for the stochastic objects.
    pub fn fine() -> Self {
        Self {
            t_min_fraction: 1e-6,
            nodes_per_decade: 60,
            max_step_fraction: 0.01,
        }
    }

    pub fn build(&self, horizon: f64) -> Result<TimeGrid> {
        TimeGrid::graded(horizon, *self)
    }
}

/// Increasing nodes `0 = t_0 < t_1 < ... < t_n = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(Error::Grid("grid must start at 0 and have >= 2 nodes".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Grid("nodes must be finite and strictly increasing".into()));
        }
        Ok(Self { nodes })
    }

    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || steps == 0 {
            return Err(Error::Grid("need T > 0 and at least one step".into()));
        }
        Self::from_nodes((0..=steps).map(|i| horizon * i as f64 / steps as f64).collect())
    }

    pub fn graded(horizon: f64, spec: GridSpec) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::Grid(format!("horizon must be positive, got {horizon}")));
        }
        if !(spec.t_min_fraction > 0.0 && spec.t_min_fraction < 1.0)
            || spec.nodes_per_decade == 0
            || !(spec.max_step_fraction > 0.0)
        {
            return Err(Error::Grid(format!("invalid grid spec {spec:?}")));
        }
        let ratio = 10f64.powf(-1.0 / spec.nodes_per_decade as f64);
        let t_min = horizon * spec.t_min_fraction;
        let mut geo = vec![horizon];
        while *geo.last().unwrap() * ratio >= t_min * (1.0 - 1e-12) {
            let next = *geo.last().unwrap() * ratio;
            geo.push(next);
        }
        geo.push(0.0);
        geo.reverse();
        let h_max = horizon * spec.max_step_fraction;
        let mut nodes = vec![0.0];
        for w in geo.windows(2) {
            let pieces = ((w[1] - w[0]) / h_max).ceil().max(1.0) as usize;
            for p in 1..=pieces {
                nodes.push(w[0] + (w[1] - w[0]) * p as f64 / pieces as f64);
            }
        }
        *nodes.last_mut().unwrap() = horizon;
        Self::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Number of dyadic windows `(T 2^{-m-1}, T 2^{-m}]` that contain a node,
    /// counted from `m = 0` until the first empty one.
    pub fn dyadic_depth(&self) -> usize {
        let t = self.horizon();
        let mut m = 0;
        loop {
            let hi = t * 0.5f64.powi(m as i32);
            let lo = hi * 0.5;
            if !self.nodes.iter().any(|&s| s > lo && s <= hi) {
                return m;
            }
            m += 1;
            if m > 200 {
                return m;
            }
        }
    }

    /// Graded means at least four consecutive dyadic windows are populated.
    pub fn is_graded(&self) -> bool {
        self.dyadic_depth() >= 4
    }

    /// Same relative layout rescaled to a new horizon.
    pub fn rescaled(&self, horizon: f64) -> Self {
        let s = horizon / self.horizon();
        Self {
            nodes: self.nodes.iter().map(|t| t * s).collect(),
        }
    }
}

/// A field sampled at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub fields: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, fields: Vec<SpectralField>) -> Result<Self> {
        if grid.len() != fields.len() {
            return Err(Error::Grid(format!(
                "{} nodes but {} fields",
                grid.len(),
                fields.len()
            )));
        }
        if let Some(f) = fields.first() {
            if fields.iter().any(|g| g.lattice() != f.lattice()) {
                return Err(Error::LatticeMismatch("trajectory mixes lattices".into()));
            }
        }
        Ok(Self { grid, fields })
    }

    pub fn constant(grid: TimeGrid, f: &SpectralField) -> Self {
        let fields = vec![f.clone(); grid.len()];
        Self { grid, fields }
    }

    pub fn zeros_like(&self) -> Self {
        let z = SpectralField::zeros(self.fields[0].lattice());
        Self::constant(self.grid.clone(), &z)
    }

    pub fn times(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn last(&self) -> &SpectralField {
        self.fields.last().unwrap()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            grid: self.grid.clone(),
            fields,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            grid: self.grid.clone(),
            fields,
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            fields: self.fields.iter().map(|f| f.scaled(a)).collect(),
        }
    }

    /// `sum_i c_i x_i` over trajectories on a common grid.
    pub fn combine(terms: &[(f64, &Trajectory)]) -> Result<Self> {
        let (c0, t0) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty combination".into()))?;
        let mut out = t0.scaled(*c0);
        for (c, t) in &terms[1..] {
            out.check(t)?;
            for (a, b) in out.fields.iter_mut().zip(&t.fields) {
                a.axpy(*c, b)?;
            }
        }
        Ok(out)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Grid("trajectories live on different grids".into()));
        }
        Ok(())
    }
}
