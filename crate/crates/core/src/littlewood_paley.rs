//! Dyadic partition of unity, Besov-type norms, Bony paraproducts and
//! time-weighted norms of trajectories.
//!
//! The profile `chi` equals 1 on `|xi| <= 3/4` and vanishes for
//! `|xi| >= 4/3`; blocks use `rho(xi) = chi(xi/2) - chi(xi)`, supported in
//! `3/4 <= |xi| <= 8/3`. Block `-1` is `chi` itself.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criticality::ell;
use crate::error::{Error, Result};
use crate::spectral::{finish_product, padded_size, sup_norm, Mode, SpectralField, TorusLattice};
use crate::time_grid::Trajectory;

const CHI_INNER: f64 = 0.75;
const CHI_OUTER: f64 = 4.0 / 3.0;

fn s(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Radial cut-off profile.
pub fn chi(r: f64) -> f64 {
    let r = r.abs();
    if r <= CHI_INNER {
        return 1.0;
    }
    if r >= CHI_OUTER {
        return 0.0;
    }
    let a = s(CHI_OUTER - r);
    let b = s(r - CHI_INNER);
    a / (a + b)
}

/// Annulus profile `chi(r/2) - chi(r)`.
pub fn rho(r: f64) -> f64 {
    chi(r / 2.0) - chi(r)
}

/// Partition of unity adapted to a lattice, blocks `j = -1 ..= j_max`.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    lattice: TorusLattice,
    j_max: i32,
    /// `weights[j + 1][idx]`.
    weights: Vec<Vec<f64>>,
}

impl DyadicPartition {
    pub fn new(lattice: TorusLattice) -> Self {
        let k_max = lattice.n() as f64 * (lattice.d() as f64).sqrt();
        // chi(k / 2^{j_max + 1}) must be 1 on the whole lattice
        let mut j_max = 0;
        while 2f64.powi(j_max + 1) * CHI_INNER < k_max {
            j_max += 1;
        }
        let weights = (-1..=j_max)
            .map(|j| {
                lattice
                    .modes()
                    .map(|(_, k)| Self::profile(j, TorusLattice::abs(k)))
                    .collect()
            })
            .collect();
        Self {
            lattice,
            j_max,
            weights,
        }
    }

    fn profile(j: i32, r: f64) -> f64 {
        if j < 0 {
            chi(r)
        } else {
            rho(r / 2f64.powi(j))
        }
    }

    pub fn lattice(&self) -> TorusLattice {
        self.lattice
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Block indices `-1 ..= j_max`.
    pub fn indices(&self) -> impl Iterator<Item = i32> {
        -1..=self.j_max
    }

    pub fn weight(&self, j: i32, k: Mode) -> f64 {
        match self.lattice.index(k) {
            Some(i) if (-1..=self.j_max).contains(&j) => self.weights[(j + 1) as usize][i],
            _ => 0.0,
        }
    }

    pub(crate) fn weights_of(&self, j: i32) -> &[f64] {
        &self.weights[(j + 1) as usize]
    }

    /// `sum_j rho_j(k)` for a lattice mode.
    pub fn partition_sum(&self, k: Mode) -> f64 {
        self.indices().map(|j| self.weight(j, k)).sum()
    }

    fn check(&self, f: &SpectralField) -> Result<()> {
        if f.lattice() != self.lattice {
            return Err(Error::LatticeMismatch(format!(
                "partition built for {:?}, field on {:?}",
                self.lattice,
                f.lattice()
            )));
        }
        Ok(())
    }

    /// `Delta_j f`; out-of-range `j` gives the zero field.
    pub fn block(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check(f)?;
        if !(-1..=self.j_max).contains(&j) {
            return Ok(SpectralField::zeros(self.lattice));
        }
        let w = self.weights_of(j);
        let coeffs = f.coeffs().iter().zip(w).map(|(c, w)| c * *w).collect();
        let mut out = SpectralField::from_coeffs(self.lattice, coeffs)?;
        if f.is_hermitian() {
            out.symmetrize();
        }
        Ok(out)
    }

    pub fn blocks(&self, f: &SpectralField) -> Result<Vec<SpectralField>> {
        self.indices().map(|j| self.block(f, j)).collect()
    }

    /// `||Delta_j f||_inf` for every block.
    pub fn block_sups(&self, f: &SpectralField) -> Result<Vec<f64>> {
        self.check(f)?;
        self.indices()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&j| sup_norm(&self.block(f, j)?))
            .collect()
    }

    /// `sup_j w_j 2^{j alpha} ||Delta_j f||_inf`, see [`block_weight`].
    pub fn besov_norm(&self, f: &SpectralField, alpha: f64, kappa: f64) -> Result<f64> {
        let sups = self.block_sups(f)?;
        Ok(self
            .indices()
            .zip(sups)
            .map(|(j, s)| block_weight(j, kappa) * 2f64.powf(j as f64 * alpha) * s)
            .fold(0.0, f64::max))
    }

    fn physical_blocks(&self, f: &SpectralField, m: usize) -> Vec<Vec<f64>> {
        self.indices()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&j| {
                self.block(f, j)
                    .expect("checked")
                    .to_physical(m)
                    .iter()
                    .map(|c| c.re)
                    .collect()
            })
            .collect()
    }

    fn assemble(&self, values: Vec<f64>, m: usize) -> SpectralField {
        let vals = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        let mut out = SpectralField::from_physical(self.lattice, vals, m);
        finish_product(&mut out, true);
        out
    }

    fn hermitian_pair(&self, f: &SpectralField, g: &SpectralField) -> Result<()> {
        self.check(f)?;
        self.check(g)?;
        if !f.is_hermitian() || !g.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        Ok(())
    }

    /// `f < g = sum_{m <= n-2} Delta_m f Delta_n g`.
    ///
    /// Pairs with `|m - n| <= 1` belong to the resonant term, so that
    /// `f g = f < g + f o g + f > g` holds exactly.
    pub fn paraproduct_lt(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.hermitian_pair(f, g)?;
        let m = padded_size(self.lattice.n());
        let bf = self.physical_blocks(f, m);
        let bg = self.physical_blocks(g, m);
        let mut acc = vec![0.0; bf[0].len()];
        let mut low = vec![0.0; bf[0].len()];
        for n in 2..bf.len() {
            for (l, v) in low.iter_mut().zip(&bf[n - 2]) {
                *l += v;
            }
            for ((a, l), h) in acc.iter_mut().zip(&low).zip(&bg[n]) {
                *a += l * h;
            }
        }
        Ok(self.assemble(acc, m))
    }

    /// `f o g = sum_{|m - n| <= 1} Delta_m f Delta_n g`.
    pub fn resonant(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.hermitian_pair(f, g)?;
        let m = padded_size(self.lattice.n());
        let bf = self.physical_blocks(f, m);
        let bg = self.physical_blocks(g, m);
        let nb = bf.len();
        let mut acc = vec![0.0; bf[0].len()];
        for a in 0..nb {
            for b in a.saturating_sub(1)..(a + 2).min(nb) {
                for ((x, p), q) in acc.iter_mut().zip(&bf[a]).zip(&bg[b]) {
                    *x += p * q;
                }
            }
        }
        Ok(self.assemble(acc, m))
    }

    /// `f > g = g < f`.
    pub fn paraproduct_gt(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.paraproduct_lt(g, f)
    }

    /// `f >= g = f > g + f o g`, the product minus `f < g`.
    pub fn paraproduct_geq(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.paraproduct_gt(f, g)?.add(&self.resonant(f, g)?)
    }
}

/// Logarithmic block weight `1 + |j|^kappa`.
///
/// `kappa = 0` gives the plain Holder-Besov norm (weight 1 everywhere);
/// otherwise `|0|^kappa` is read as 0, so the weights at `j = -1, 0` are 2 and 1.
pub fn block_weight(j: i32, kappa: f64) -> f64 {
    if kappa == 0.0 {
        1.0
    } else if j == 0 {
        1.0
    } else {
        1.0 + (j.abs() as f64).powf(kappa)
    }
}

/// Parameters of `sup_{t} t^beta l(t)^nu ||u(t)||_{alpha, kappa}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormParams {
    pub alpha: f64,
    pub kappa: f64,
    pub beta: f64,
    pub nu: f64,
}

impl WeightedNormParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            kappa: 0.0,
            beta,
            nu: 0.0,
        }
    }

    /// Time weight `t^beta l(t)^nu`; `None` where it is infinite.
    pub fn time_weight(&self, t: f64) -> Option<f64> {
        if t == 0.0 {
            return match self.beta {
                b if b > 0.0 => Some(0.0),
                b if b == 0.0 && self.nu == 0.0 => Some(1.0),
                _ => None,
            };
        }
        Some(t.powf(self.beta) * ell(t).powf(self.nu))
    }
}

/// Value of a weighted norm with the time at which it is attained.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedNorm {
    pub value: f64,
    pub argmax_t: f64,
    /// `(t, weighted value)` on every node that was evaluated.
    pub profile: Vec<(f64, f64)>,
}

/// Grid version of the time-weighted Besov norm of a trajectory.
pub fn weighted_norm(
    traj: &Trajectory,
    params: &WeightedNormParams,
    partition: &DyadicPartition,
) -> Result<WeightedNorm> {
    let items: Vec<(f64, f64)> = traj
        .times()
        .par_iter()
        .zip(traj.fields.par_iter())
        .filter_map(|(&t, f)| params.time_weight(t).map(|w| (t, w, f)))
        .map(|(t, w, f)| {
            let v = if w == 0.0 {
                0.0
            } else {
                w * partition.besov_norm(f, params.alpha, params.kappa)?
            };
            Ok((t, v))
        })
        .collect::<Result<_>>()?;
    let (argmax_t, value) = items
        .iter()
        .copied()
        .fold((0.0, 0.0), |acc, (t, v)| if v > acc.1 { (t, v) } else { acc });
    Ok(WeightedNorm {
        value,
        argmax_t,
        profile: items,
    })
}

/// Windowed weighted norms over `(0, T 2^{-m}]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VanishingReport {
    /// `(right end of window, windowed norm)`, outermost first.
    pub windows: Vec<(f64, f64)>,
    pub limit_estimate: f64,
    pub vanishes: bool,
}

/// Decides whether `||u||_{alpha, beta, T} -> 0` as `T -> 0` on the grid.
///
/// The verdict is positive when each of the last three windows shrinks the
/// value by more than the relative tolerance `tol`.
pub fn vanishing_check(
    traj: &Trajectory,
    params: &WeightedNormParams,
    partition: &DyadicPartition,
    tol: f64,
) -> Result<VanishingReport> {
    let depth = traj.grid.dyadic_depth();
    if depth < 4 {
        return Err(Error::Grid(format!(
            "grid is not graded toward 0 (only {depth} dyadic windows populated)"
        )));
    }
    let profile = weighted_norm(traj, params, partition)?.profile;
    let t = traj.grid.horizon();
    let windows: Vec<(f64, f64)> = (0..depth)
        .map(|m| {
            let right = t * 0.5f64.powi(m as i32);
            let v = profile
                .iter()
                .filter(|(s, _)| *s <= right)
                .map(|p| p.1)
                .fold(0.0, f64::max);
            (right, v)
        })
        .collect();
    let tail = &windows[windows.len() - 3..];
    let vanishes = tail[0].1 > 0.0
        && tail
            .windows(2)
            .all(|w| w[1].1 < (1.0 - tol) * w[0].1);
    // Aitken extrapolation of the last three windows
    let (x0, x1, x2) = (tail[0].1, tail[1].1, tail[2].1);
    let denom = (x2 - x1) - (x1 - x0);
    let limit_estimate = if denom.abs() > f64::EPSILON * x0.abs() {
        (x2 - (x2 - x1).powi(2) / denom).max(0.0)
    } else {
        x2
    };
    Ok(VanishingReport {
        windows,
        limit_estimate,
        vanishes,
    })
}

/// One line of the per-block time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub t: f64,
    pub j: i32,
    pub block_sup: f64,
    pub norm: f64,
}

/// `(t, j, ||Delta_j u(t)||_inf, ||u(t)||_{alpha,kappa})` for every node and block.
pub fn block_series(
    traj: &Trajectory,
    partition: &DyadicPartition,
    alpha: f64,
    kappa: f64,
) -> Result<Vec<BlockRow>> {
    let mut rows = Vec::new();
    for (&t, f) in traj.times().iter().zip(&traj.fields) {
        let sups = partition.block_sups(f)?;
        let norm = partition
            .indices()
            .zip(&sups)
            .map(|(j, s)| block_weight(j, kappa) * 2f64.powf(j as f64 * alpha) * s)
            .fold(0.0, f64::max);
        for (j, s) in partition.indices().zip(sups) {
            rows.push(BlockRow {
                t,
                j,
                block_sup: s,
                norm,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_have_the_stated_supports() {
        assert_eq!(chi(0.75), 1.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        assert_eq!(rho(0.74), 0.0);
        assert_eq!(rho(8.0 / 3.0), 0.0);
        assert!(rho(1.4) == 1.0);
    }

    #[test]
    fn interior_mode_has_unit_norm() {
        let lat = TorusLattice::new(1, 32).unwrap();
        let p = DyadicPartition::new(lat);
        let one = Complex64::new(0.5, 0.0);
        let f = SpectralField::from_modes(lat, &[([11, 0], one), ([-11, 0], one)]).unwrap();
        assert_eq!(p.weight(3, [11, 0]), 1.0);
        assert!((p.besov_norm(&f, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
    }
}
