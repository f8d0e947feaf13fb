//! Picard iteration of the mild formulations.
//!
//! * `fix1`: `u = e^{tA} u_0 + V(u, u)`.
//! * `fix2`: `v = V(v, v) + 2 V(v, eta0) + eta2`, `u = eta0 + v`.
//! * `second_order`: `v = 4 V(V(v < eta0) < eta0) + 2 V(R(v) < eta0) + R(v)`.
//! * `classical`: `v = 2 V(v < eta0) + R(v)`, the paracontrolled form kept inline.
//!
//! Each run starts from the natural first iterate, measures increments in
//! the grid version of the working norm and halves the horizon when the
//! iteration fails to contract.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criticality::{fix1_feasible, fix2_feasible, qf, Q};
use crate::equations::{dx, EquationKind, EquationSpec};
use crate::error::{Error, Result};
use crate::littlewood_paley::{weighted_norm, DyadicPartition, WeightedNormParams};
use crate::solver::mild::{apply_v, duhamel, linear_trajectory};
use crate::spectral::{derivative_multiplier, project_mean_zero, SpectralField};
use crate::stochastic::StochasticObjects;
use crate::time_grid::{GridSpec, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    Fix1,
    Fix2,
    SecondOrder,
    Classical,
}

impl Formulation {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fix1" => Ok(Formulation::Fix1),
            "fix2" => Ok(Formulation::Fix2),
            "second_order" => Ok(Formulation::SecondOrder),
            "classical" => Ok(Formulation::Classical),
            other => Err(Error::Config(format!("unknown formulation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PicardConfig {
    pub horizon: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Time weight of `eta0` for the fix2 gate.
    pub gamma: f64,
    pub kappa: f64,
    /// Logarithmic exponent of the data, used by the paracontrolled gates.
    pub nu: f64,
    pub grid: GridSpec,
    pub max_iter: usize,
    /// Stop once `||x_{n+1} - x_n|| <= tol (1 + ||x_{n+1}||)`.
    pub tol: f64,
    pub max_halvings: usize,
    /// Reject data whose weighted norm is set by the resolution limit.
    pub check_space: bool,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            horizon: 0.1,
            alpha: 0.0,
            beta: 0.25,
            gamma: 0.25,
            kappa: 1.3,
            nu: 0.8,
            grid: GridSpec::default(),
            max_iter: 80,
            tol: 1e-10,
            max_halvings: 20,
            check_space: true,
        }
    }
}

/// Outcome of a converged Picard run.
#[derive(Debug, Clone)]
pub struct PicardResult {
    pub formulation: Formulation,
    pub config: PicardConfig,
    pub converged: bool,
    pub t_effective: f64,
    pub halvings: usize,
    pub iterate_norms: Vec<f64>,
    pub increments: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `||x - Phi(x)||` of the returned iterate, in the working norm.
    pub residual: f64,
    /// The fixed point of the iterated map (`u` for fix1, `v` otherwise).
    pub iterate: Trajectory,
    /// The solution `u` of the equation.
    pub solution: Trajectory,
    /// Norms of the three terms of the second-order map at the fixed point.
    pub term_norms: Option<[f64; 3]>,
}

/// Serializable digest of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PicardSummary {
    pub formulation: Formulation,
    pub params: PicardConfig,
    pub converged: bool,
    #[serde(rename = "T_effective")]
    pub t_effective: f64,
    pub halvings: usize,
    pub ratios: Vec<f64>,
    pub residual: f64,
    pub term_norms: Option<[f64; 3]>,
}

impl PicardResult {
    pub fn summary(&self) -> PicardSummary {
        PicardSummary {
            formulation: self.formulation,
            params: self.config,
            converged: self.converged,
            t_effective: self.t_effective,
            halvings: self.halvings,
            ratios: self.ratios.clone(),
            residual: self.residual,
            term_norms: self.term_norms,
        }
    }
}

struct Run {
    iterate: Trajectory,
    norms: Vec<f64>,
    increments: Vec<f64>,
    ratios: Vec<f64>,
    residual: f64,
}

enum Attempt {
    Done(Run),
    Failed(Vec<f64>),
}

fn iterate(
    map: impl Fn(&Trajectory) -> Result<Trajectory>,
    norm: impl Fn(&Trajectory) -> Result<f64>,
    start: Trajectory,
    cfg: &PicardConfig,
) -> Result<Attempt> {
    let mut x = start;
    let mut norms = vec![norm(&x)?];
    let mut increments = Vec::new();
    let mut ratios = Vec::new();
    for _ in 0..cfg.max_iter {
        let y = map(&x)?;
        let inc = norm(&y.sub(&x)?)?;
        let ny = norm(&y)?;
        if !inc.is_finite() || !ny.is_finite() {
            return Ok(Attempt::Failed(ratios));
        }
        if let Some(&prev) = increments.last() {
            let r: f64 = if prev > 0.0 { inc / prev } else { 0.0 };
            ratios.push(r);
            if r >= 1.0 {
                return Ok(Attempt::Failed(ratios));
            }
        }
        increments.push(inc);
        norms.push(ny);
        x = y;
        if inc <= cfg.tol * (1.0 + ny) {
            let residual = norm(&map(&x)?.sub(&x)?)?;
            return Ok(Attempt::Done(Run {
                iterate: x,
                norms,
                increments,
                ratios,
                residual,
            }));
        }
    }
    Ok(Attempt::Failed(ratios))
}

/// Retries on `[0, T/2^h]` until the iteration converges.
fn with_halving(
    cfg: &PicardConfig,
    mut attempt: impl FnMut(f64) -> Result<Option<(Run, Trajectory, Option<[f64; 3]>)>>,
    formulation: Formulation,
) -> Result<PicardResult> {
    let mut horizon = cfg.horizon;
    for h in 0..=cfg.max_halvings {
        if let Some((run, solution, term_norms)) = attempt(horizon)? {
            return Ok(PicardResult {
                formulation,
                config: *cfg,
                converged: true,
                t_effective: horizon,
                halvings: h,
                iterate_norms: run.norms,
                increments: run.increments,
                ratios: run.ratios,
                residual: run.residual,
                iterate: run.iterate,
                solution,
                term_norms,
            });
        }
        horizon *= 0.5;
    }
    Err(Error::NonContraction {
        attempts: cfg.max_halvings + 1,
        last_horizon: horizon * 2.0,
        last_ratios: Vec::new(),
    })
}

fn check_config(cfg: &PicardConfig) -> Result<()> {
    if !(cfg.horizon > 0.0) || cfg.max_iter == 0 || !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(
            "need horizon > 0, max_iter > 0 and tol > 0".into(),
        ));
    }
    Ok(())
}

fn x_norm<'a>(
    partition: &'a DyadicPartition,
    params: WeightedNormParams,
) -> impl Fn(&Trajectory) -> Result<f64> + 'a {
    move |t| Ok(weighted_norm(t, &params, partition)?.value)
}

/// `Some(t)` when `sup_t t^beta ||x(t)||_alpha` over the resolved times
/// `t >= max(t_1, N^{-tau})` is attained within a factor 2 of the left
/// edge `t`: the value is then fixed by the cutoff and diverges under
/// refinement.
pub fn resolution_edge(
    traj: &Trajectory,
    params: &WeightedNormParams,
    partition: &DyadicPartition,
    tau: f64,
) -> Result<Option<f64>> {
    if params.beta <= 0.0 {
        return Ok(None);
    }
    let nodes = traj.times();
    let n = partition.lattice().n() as f64;
    let t_res = nodes.get(1).copied().unwrap_or(0.0).max(n.powf(-tau));
    let w = weighted_norm(traj, params, partition)?;
    let resolved: Vec<(f64, f64)> = w.profile.iter().copied().filter(|p| p.0 >= t_res).collect();
    let Some(&(edge, _)) = resolved.first() else {
        return Ok(None);
    };
    let (argmax, max) = resolved
        .iter()
        .fold((edge, 0.0), |acc, &(t, v)| if v > acc.1 { (t, v) } else { acc });
    Ok((max > 0.0 && argmax <= 2.0 * edge).then_some(edge))
}

fn require_in_space(
    what: &str,
    traj: &Trajectory,
    params: WeightedNormParams,
    partition: &DyadicPartition,
    spec: &EquationSpec,
) -> Result<()> {
    match resolution_edge(traj, &params, partition, spec.tau_f())? {
        Some(t) => Err(Error::OutsideSpace(
            format!("{what} (alpha = {}, weight t^{})", params.alpha, params.beta),
            t,
        )),
        None => Ok(()),
    }
}

fn delta_at(spec: &EquationSpec, alpha: f64) -> f64 {
    1.0 - (alpha + qf(spec.sigma)) / spec.tau_f()
}

/// `u = e^{tA} u_0 + V(u, u)` in `X^{alpha, beta}_T`.
pub fn solve_fix1(
    spec: &EquationSpec,
    u0: &SpectralField,
    partition: &DyadicPartition,
    cfg: &PicardConfig,
) -> Result<PicardResult> {
    check_config(cfg)?;
    let del = delta_at(spec, cfg.alpha);
    if !fix1_feasible(cfg.beta, del) {
        return Err(Error::ParameterGate(format!(
            "fix1 needs beta < 1/2 and beta <= 1 - delta (beta = {}, delta = {del})",
            cfg.beta
        )));
    }
    let norm = x_norm(partition, WeightedNormParams::new(cfg.alpha, cfg.beta));
    let mut last = Vec::new();
    with_halving(
        cfg,
        |horizon| {
            let grid = cfg.grid.build(horizon)?;
            let eta = linear_trajectory(spec, u0, &grid)?;
            if cfg.check_space && horizon == cfg.horizon {
                let p = WeightedNormParams::new(cfg.alpha, cfg.beta);
                require_in_space("e^{tA} u_0", &eta, p, partition, spec)?;
            }
            let map = |u: &Trajectory| eta.add(&apply_v(spec, u, u)?);
            match iterate(map, &norm, eta.clone(), cfg)? {
                Attempt::Done(run) => {
                    let sol = run.iterate.clone();
                    Ok(Some((run, sol, None)))
                }
                Attempt::Failed(r) => {
                    last = r;
                    Ok(None)
                }
            }
        },
        Formulation::Fix1,
    )
    .map_err(|e| attach_ratios(e, &last))
}

fn attach_ratios(e: Error, last: &[f64]) -> Error {
    match e {
        Error::NonContraction {
            attempts,
            last_horizon,
            ..
        } => Error::NonContraction {
            attempts,
            last_horizon,
            last_ratios: last.to_vec(),
        },
        other => other,
    }
}

/// `v = V(v, v) + 2 V(v, eta0) + eta2` in `X^{alpha, beta}_T`; returns `u = eta0 + v`.
pub fn solve_fix2(
    spec: &EquationSpec,
    u0: &SpectralField,
    partition: &DyadicPartition,
    cfg: &PicardConfig,
) -> Result<PicardResult> {
    check_config(cfg)?;
    let del = delta_at(spec, cfg.alpha);
    if !fix2_feasible(cfg.beta, cfg.gamma, del) {
        return Err(Error::ParameterGate(format!(
            "fix2 needs beta < 1/2, beta + delta <= 1, gamma + beta < 1, delta + gamma <= 1 \
             (beta = {}, gamma = {}, delta = {del})",
            cfg.beta, cfg.gamma
        )));
    }
    let norm = x_norm(partition, WeightedNormParams::new(cfg.alpha, cfg.beta));
    let mut last = Vec::new();
    with_halving(
        cfg,
        |horizon| {
            let grid = cfg.grid.build(horizon)?;
            let obj = StochasticObjects::build(spec, u0, &grid)?;
            if cfg.check_space && horizon == cfg.horizon {
                let p = WeightedNormParams::new(cfg.alpha, cfg.gamma);
                require_in_space("eta0", &obj.eta0, p, partition, spec)?;
                let p = WeightedNormParams::new(cfg.alpha, cfg.beta);
                require_in_space("eta2", &obj.eta2, p, partition, spec)?;
            }
            let map = |v: &Trajectory| {
                let w = Trajectory::combine(&[(1.0, v), (2.0, &obj.eta0)])?;
                apply_v(spec, v, &w)?.add(&obj.eta2)
            };
            match iterate(map, &norm, obj.eta2.clone(), cfg)? {
                Attempt::Done(run) => {
                    let sol = run.iterate.add(&obj.eta0)?;
                    Ok(Some((run, sol, None)))
                }
                Attempt::Failed(r) => {
                    last = r;
                    Ok(None)
                }
            }
        },
        Formulation::Fix2,
    )
    .map_err(|e| attach_ratios(e, &last))
}

/// `B(u, v) = L(u v)` splits along any bilinear decomposition of the product.
fn outer_operator(spec: &EquationSpec) -> Result<impl Fn(&SpectralField) -> SpectralField + '_> {
    let ok = match spec.kind {
        EquationKind::Burgers | EquationKind::ReactionDiffusion => true,
        EquationKind::Generic => spec.b == Q::from_integer(0),
        _ => false,
    };
    if !ok || spec.d != 1 {
        return Err(Error::InvalidParameter(format!(
            "paraproduct formulations need B(u, v) = L(uv) in d = 1; {} does not qualify",
            spec.kind.name()
        )));
    }
    Ok(move |p: &SpectralField| match spec.kind {
        EquationKind::Burgers => dx(p),
        EquationKind::ReactionDiffusion => project_mean_zero(p),
        _ => {
            let q = derivative_multiplier(p, spec.a_f());
            if spec.mass_conserving {
                project_mean_zero(&q)
            } else {
                q
            }
        }
    })
}

#[derive(Clone, Copy)]
enum Para {
    Lt,
    Geq,
}

/// Paracontrolled building blocks tied to one set of objects.
pub struct ParaOps<'a> {
    spec: &'a EquationSpec,
    partition: &'a DyadicPartition,
    objects: &'a StochasticObjects,
}

impl<'a> ParaOps<'a> {
    pub fn new(
        spec: &'a EquationSpec,
        partition: &'a DyadicPartition,
        objects: &'a StochasticObjects,
    ) -> Result<Self> {
        let _ = outer_operator(spec)?;
        Ok(Self {
            spec,
            partition,
            objects,
        })
    }

    fn para(&self, kind: Para, a: &Trajectory) -> Result<Trajectory> {
        let outer = outer_operator(self.spec)?;
        let fields = a
            .fields
            .par_iter()
            .zip(self.objects.eta0.fields.par_iter())
            .map(|(f, e)| {
                let p = match kind {
                    Para::Lt => self.partition.paraproduct_lt(f, e)?,
                    Para::Geq => self.partition.paraproduct_geq(f, e)?,
                };
                Ok(outer(&p))
            })
            .collect::<Result<_>>()?;
        duhamel(self.spec, &Trajectory::new(a.grid.clone(), fields)?)
    }

    /// `V(a < eta0)`.
    pub fn v_lt(&self, a: &Trajectory) -> Result<Trajectory> {
        self.para(Para::Lt, a)
    }

    /// `V(a >= eta0)`.
    pub fn v_geq(&self, a: &Trajectory) -> Result<Trajectory> {
        self.para(Para::Geq, a)
    }

    /// `R(v) = V(v, v) + eta2 + 2 V(v >= eta0)`.
    pub fn remainder(&self, v: &Trajectory) -> Result<Trajectory> {
        let vv = apply_v(self.spec, v, v)?;
        Trajectory::combine(&[(1.0, &vv), (1.0, &self.objects.eta2), (2.0, &self.v_geq(v)?)])
    }

    /// The three terms of the second-order map.
    pub fn second_order_terms(&self, v: &Trajectory) -> Result<[Trajectory; 3]> {
        let r = self.remainder(v)?;
        let double = self.v_lt(&self.v_lt(v)?)?.scaled(4.0);
        let single = self.v_lt(&r)?.scaled(2.0);
        Ok([double, single, r])
    }

    /// `4 V(V(w < eta0) < eta0)`.
    pub fn double_paraproduct(&self, w: &Trajectory) -> Result<Trajectory> {
        Ok(self.v_lt(&self.v_lt(w)?)?.scaled(4.0))
    }
}

/// `R(v)` for a trajectory on the grid of `objects`.
pub fn remainder_r(
    spec: &EquationSpec,
    partition: &DyadicPartition,
    objects: &StochasticObjects,
    v: &Trajectory,
) -> Result<Trajectory> {
    ParaOps::new(spec, partition, objects)?.remainder(v)
}

fn paracontrolled(
    spec: &EquationSpec,
    u0: &SpectralField,
    partition: &DyadicPartition,
    cfg: &PicardConfig,
    formulation: Formulation,
) -> Result<PicardResult> {
    check_config(cfg)?;
    let _ = outer_operator(spec)?;
    let (nu_ok, kappa_hi) = match formulation {
        Formulation::SecondOrder => (cfg.nu > 0.5 && cfg.nu <= 1.0, 2.0 * cfg.nu),
        _ => (cfg.nu > 1.0, cfg.nu),
    };
    if !nu_ok || !(cfg.kappa > 1.0 && cfg.kappa <= kappa_hi) || !(cfg.beta > 0.25 && cfg.beta < 0.5)
    {
        return Err(Error::ParameterGate(format!(
            "{formulation:?} needs nu in {}, kappa in (1, {kappa_hi}], beta in (1/4, 1/2) \
             (nu = {}, kappa = {}, beta = {})",
            if formulation == Formulation::SecondOrder { "(1/2, 1]" } else { "(1, inf)" },
            cfg.nu,
            cfg.kappa,
            cfg.beta
        )));
    }
    let params = WeightedNormParams {
        alpha: 0.0,
        kappa: cfg.kappa,
        beta: cfg.beta,
        nu: 0.0,
    };
    let norm = x_norm(partition, params);
    let mut last = Vec::new();
    with_halving(
        cfg,
        |horizon| {
            let grid = cfg.grid.build(horizon)?;
            let obj = StochasticObjects::build(spec, u0, &grid)?;
            let ops = ParaOps::new(spec, partition, &obj)?;
            let map = |v: &Trajectory| -> Result<Trajectory> {
                if formulation == Formulation::SecondOrder {
                    let [a, b, c] = ops.second_order_terms(v)?;
                    Trajectory::combine(&[(1.0, &a), (1.0, &b), (1.0, &c)])
                } else {
                    ops.v_lt(v)?.scaled(2.0).add(&ops.remainder(v)?)
                }
            };
            match iterate(map, &norm, obj.eta2.clone(), cfg)? {
                Attempt::Done(run) => {
                    let sol = run.iterate.add(&obj.eta0)?;
                    let terms = if formulation == Formulation::SecondOrder {
                        let t = ops.second_order_terms(&run.iterate)?;
                        Some([norm(&t[0])?, norm(&t[1])?, norm(&t[2])?])
                    } else {
                        None
                    };
                    Ok(Some((run, sol, terms)))
                }
                Attempt::Failed(r) => {
                    last = r;
                    Ok(None)
                }
            }
        },
        formulation,
    )
    .map_err(|e| attach_ratios(e, &last))
}

/// Second-order paracontrolled expansion in `Y^{kappa, beta}_T`.
pub fn solve_second_order(
    spec: &EquationSpec,
    u0: &SpectralField,
    partition: &DyadicPartition,
    cfg: &PicardConfig,
) -> Result<PicardResult> {
    paracontrolled(spec, u0, partition, cfg, Formulation::SecondOrder)
}

/// First-order paracontrolled form for data with `nu > 1`.
pub fn solve_classical(
    spec: &EquationSpec,
    u0: &SpectralField,
    partition: &DyadicPartition,
    cfg: &PicardConfig,
) -> Result<PicardResult> {
    paracontrolled(spec, u0, partition, cfg, Formulation::Classical)
}

/// Dispatch on the formulation.
pub fn solve(
    formulation: Formulation,
    spec: &EquationSpec,
    u0: &SpectralField,
    partition: &DyadicPartition,
    cfg: &PicardConfig,
) -> Result<PicardResult> {
    match formulation {
        Formulation::Fix1 => solve_fix1(spec, u0, partition, cfg),
        Formulation::Fix2 => solve_fix2(spec, u0, partition, cfg),
        Formulation::SecondOrder => solve_second_order(spec, u0, partition, cfg),
        Formulation::Classical => solve_classical(spec, u0, partition, cfg),
    }
}
