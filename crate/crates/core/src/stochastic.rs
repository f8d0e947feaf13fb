//! The objects built from the linear evolution of the initial datum:
//! `eta0 = e^{tA} u_0`, `eta1 = B(eta0, eta0)` and `eta2 = V(eta0, eta0)`,
//! with exact second moments of their Littlewood-Paley blocks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::fit::{linear_fit, log_space};
use crate::littlewood_paley::DyadicPartition;
use crate::random_ic::{derive_seed, sample_ic, GaussianIcSpec};
use crate::solver::mild::{duhamel, linear_trajectory, nonlinear_trajectory, phi1};
use crate::spectral::{SpectralField, TorusLattice};
use crate::time_grid::{TimeGrid, Trajectory};

/// `eta0`, `eta1` and `eta2` sampled on one grid.
#[derive(Debug, Clone)]
pub struct StochasticObjects {
    pub eta0: Trajectory,
    pub eta1: Trajectory,
    pub eta2: Trajectory,
}

impl StochasticObjects {
    pub fn build(spec: &EquationSpec, u0: &SpectralField, grid: &TimeGrid) -> Result<Self> {
        if u0.lattice().d() != spec.d {
            return Err(Error::LatticeMismatch("initial datum dimension differs".into()));
        }
        let eta0 = linear_trajectory(spec, u0, grid)?;
        let eta1 = nonlinear_trajectory(spec, &eta0, &eta0)?;
        let eta2 = duhamel(spec, &eta1)?;
        Ok(Self { eta0, eta1, eta2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chaos {
    Eta1,
    Eta2,
}

/// `int_0^t e^{(t-s) lambda} e^{s mu} ds`.
fn time_factor(lambda: f64, mu: f64, t: f64) -> f64 {
    let (hi, lo) = if lambda >= mu { (lambda, mu) } else { (mu, lambda) };
    (t * hi).exp() * t * phi1(-t * (hi - lo))
}

/// `E |Delta_j eta(t, 0)|^2` for every block, by summing over Wick pairings
/// of the Gaussian coefficients (including the non-symmetric and mean terms).
pub fn exact_block_moments(
    spec: &EquationSpec,
    ic: &GaussianIcSpec,
    partition: &DyadicPartition,
    chaos: Chaos,
    t: f64,
) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("moment time must be positive".into()));
    }
    let lat = partition.lattice();
    if lat.d() != spec.d {
        return Err(Error::LatticeMismatch("partition dimension differs".into()));
    }
    let nb = (partition.j_max() + 2) as usize;
    let amp = |m: [i64; 2], n: [i64; 2]| -> Option<(usize, Complex64)> {
        let (k, c) = spec.kernel(m, n)?;
        let ki = lat.index(k)?;
        let (lm, ln) = (spec.eigenvalue(m), spec.eigenvalue(n));
        let g = match chaos {
            Chaos::Eta1 => (t * (lm + ln)).exp(),
            Chaos::Eta2 => time_factor(spec.eigenvalue(k), lm + ln, t),
        };
        Some((ki, c * (ic.weight(m) * ic.weight(n) * g)))
    };
    let weights: Vec<&[f64]> = partition.indices().map(|j| partition.weights_of(j)).collect();
    let modes: Vec<[i64; 2]> = lat
        .modes()
        .map(|(_, k)| k)
        .filter(|&k| ic.weight(k) != 0.0)
        .collect();
    // per-mode partial sums, reduced in lattice order for reproducibility
    let parts: Vec<(Vec<f64>, Vec<Complex64>)> = modes
        .par_iter()
        .map(|&m| {
            let mut var = vec![0.0; nb];
            let mut mean = vec![Complex64::new(0.0, 0.0); nb];
            if let Some((ki, a)) = amp(m, [-m[0], -m[1]]) {
                for b in 0..nb {
                    mean[b] += a * weights[b][ki];
                }
            }
            for &n in &modes {
                let Some((ki, a)) = amp(m, n) else { continue };
                let swapped = amp(n, m);
                for b in 0..nb {
                    let w = weights[b][ki];
                    if w == 0.0 {
                        continue;
                    }
                    let mut v = (w * a).norm_sqr();
                    if let Some((kj, c)) = swapped {
                        v += (w * a * (weights[b][kj] * c).conj()).re;
                    }
                    var[b] += v;
                }
            }
            (var, mean)
        })
        .collect();
    let mut var = vec![0.0; nb];
    let mut mean = vec![Complex64::new(0.0, 0.0); nb];
    for (v, m) in &parts {
        for b in 0..nb {
            var[b] += v[b];
            mean[b] += m[b];
        }
    }
    Ok(var
        .iter()
        .zip(&mean)
        .map(|(v, m)| v + m.norm_sqr())
        .collect())
}

/// Single-block version of [`exact_block_moments`].
pub fn exact_second_moment(
    spec: &EquationSpec,
    ic: &GaussianIcSpec,
    partition: &DyadicPartition,
    chaos: Chaos,
    j: i32,
    t: f64,
) -> Result<f64> {
    if !partition.indices().any(|i| i == j) {
        return Err(Error::InvalidParameter(format!("block {j} outside the partition")));
    }
    Ok(exact_block_moments(spec, ic, partition, chaos, t)?[(j + 1) as usize])
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `E |Delta_j eta1(t, 0)|^2`.
pub fn mc_second_moment(
    spec: &EquationSpec,
    ic: &GaussianIcSpec,
    partition: &DyadicPartition,
    j: i32,
    t: f64,
    samples: usize,
) -> Result<MomentEstimate> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let lat = partition.lattice();
    let vals: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let u0 = sample_ic(&ic.with_seed(derive_seed(ic.seed, r)), lat)?;
            let e0 = spec.semigroup_apply(&u0, t)?;
            let e1 = spec.nonlinearity(&e0, &e0)?;
            let x: Complex64 = partition.block(&e1, j)?.coeffs().iter().sum();
            Ok(x.norm_sqr())
        })
        .collect::<Result<_>>()?;
    Ok(mean_and_error(&vals))
}

pub(crate) fn mean_and_error(vals: &[f64]) -> MomentEstimate {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    MomentEstimate {
        mean,
        std_err: (var / n).sqrt(),
        samples: vals.len(),
    }
}

/// How `E ||eta(t)||_alpha` is evaluated in a singularity fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Estimator {
    /// `sup_j 2^{j alpha} (E |Delta_j eta(t, 0)|^2)^{1/2}` from exact moments.
    ExactMoments,
    /// Ensemble mean of `||eta1(t)||_alpha`.
    MonteCarlo { samples: usize },
    /// `||eta1(t)||_alpha` for the deterministic datum with `u_0(k) = |k|^theta`.
    Deterministic,
}

/// Power-law fit `E ||eta(t)||_alpha ~ C t^{-exponent}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularityFit {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub exponent: f64,
    pub prefactor: f64,
    pub r2: f64,
}

/// The default window `[4 N^{-tau}, 1e-1]`.
pub fn default_window(spec: &EquationSpec, lattice: TorusLattice) -> (f64, f64) {
    (4.0 * (lattice.n() as f64).powf(-spec.tau_f()), 1e-1)
}

/// Log-log regression of the singularity of `eta1` or `eta2` at `t = 0`.
#[allow(clippy::too_many_arguments)]
pub fn singularity_fit(
    spec: &EquationSpec,
    ic: &GaussianIcSpec,
    partition: &DyadicPartition,
    chaos: Chaos,
    alpha: f64,
    estimator: Estimator,
    window: (f64, f64),
    points: usize,
) -> Result<SingularityFit> {
    let lat = partition.lattice();
    let resolved = (lat.n() as f64).powf(-spec.tau_f());
    if window.0 < resolved || window.1 <= window.0 {
        return Err(Error::InvalidParameter(format!(
            "window [{:e}, {:e}] touches unresolved scales (N^-tau = {resolved:e})",
            window.0, window.1
        )));
    }
    if points < 3 {
        return Err(Error::InvalidParameter("need at least 3 fit points".into()));
    }
    let times = log_space(window.0, window.1, points);
    let scale = |j: i32| 2f64.powf(j as f64 * alpha);
    let values: Vec<f64> = match estimator {
        Estimator::ExactMoments => times
            .iter()
            .map(|&t| {
                let mom = exact_block_moments(spec, ic, partition, chaos, t)?;
                Ok(partition
                    .indices()
                    .zip(mom)
                    .map(|(j, m)| scale(j) * m.sqrt())
                    .fold(0.0, f64::max))
            })
            .collect::<Result<_>>()?,
        Estimator::MonteCarlo { samples } => {
            if chaos != Chaos::Eta1 {
                return Err(Error::InvalidParameter(
                    "ensemble estimator is available for eta1 only".into(),
                ));
            }
            if samples == 0 {
                return Err(Error::InvalidParameter("need at least one sample".into()));
            }
            let per: Vec<Vec<f64>> = (0..samples as u64)
                .into_par_iter()
                .map(|r| {
                    let u0 = sample_ic(&ic.with_seed(derive_seed(ic.seed, r)), lat)?;
                    eta1_norms(spec, &u0, partition, alpha, &times)
                })
                .collect::<Result<_>>()?;
            (0..times.len())
                .map(|i| per.iter().map(|p| p[i]).sum::<f64>() / samples as f64)
                .collect()
        }
        Estimator::Deterministic => {
            if chaos != Chaos::Eta1 {
                return Err(Error::InvalidParameter(
                    "deterministic comparison is available for eta1 only".into(),
                ));
            }
            let u0 = SpectralField::from_fn(lat, |k| Complex64::new(ic.weight(k), 0.0));
            eta1_norms(spec, &u0, partition, alpha, &times)?
        }
    };
    let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let fit = linear_fit(&lx, &ly)?;
    Ok(SingularityFit {
        times,
        values,
        exponent: -fit.slope,
        prefactor: fit.intercept.exp(),
        r2: fit.r2,
    })
}

fn eta1_norms(
    spec: &EquationSpec,
    u0: &SpectralField,
    partition: &DyadicPartition,
    alpha: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    times
        .iter()
        .map(|&t| {
            let e0 = spec.semigroup_apply(u0, t)?;
            partition.besov_norm(&spec.nonlinearity(&e0, &e0)?, alpha, 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_factor_matches_quadrature() {
        let (l, m, t) = (-4.0f64, -2.0f64, 1.0f64);
        let exact = ((m * t).exp() - (l * t).exp()) / (m - l);
        assert!((time_factor(l, m, t) - exact).abs() < 1e-15);
        assert!((time_factor(-3.0, -3.0, 0.5) - 0.5 * (-1.5f64).exp()).abs() < 1e-15);
    }
}
