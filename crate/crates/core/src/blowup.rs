//! Odd-sine counterexample: `u = sum_k xi_k sin(kx)` under
//! `d/dt xi_k = -k^2 xi_k + k xi_k^2`, mode by mode.
//!
//! The Riccati modes decouple, so every mode has the explicit escape time
//! `tau_k = -log(1 - k/xi_k(0)) / k^2` (infinite unless `xi_k(0) > k`).
//! The constant of the convolution is absorbed into `xi_k`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicPartition;
use crate::random_ic::{derive_seed, keyed_normals, probe_ensemble, GrowthProbe};
use crate::spectral::SpectralField;

/// Which weight family drives the Gaussian initial modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupRegime {
    /// `sigma_k = k / (lambda sqrt(log k) (1 - e^{-eps k^2}))`.
    SubcriticalLemma1,
    /// `sigma_k = k / (sqrt(2 log k) (1 - e^{-k^2 eps_k}))`.
    CriticalLemma2,
}

/// `eps_k = c k^{s - 2}`; `s >= 0` keeps `inf k^2 eps_k > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSequence {
    pub c: f64,
    pub s: f64,
}

impl EpsilonSequence {
    pub fn at(&self, k: usize) -> f64 {
        self.c * (k as f64).powf(self.s - 2.0)
    }

    pub fn inf_k2_positive(&self) -> bool {
        self.s >= 0.0
    }
}

impl Default for EpsilonSequence {
    fn default() -> Self {
        Self { c: 1.0, s: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupWeightSpec {
    pub regime: BlowupRegime,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub epsilon_k: EpsilonSequence,
    pub k_max: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_lambda() -> f64 {
    1.6
}

fn default_epsilon() -> f64 {
    0.1
}

impl BlowupWeightSpec {
    pub fn lemma1(lambda: f64, epsilon: f64, k_max: usize, seed: u64) -> Self {
        Self {
            regime: BlowupRegime::SubcriticalLemma1,
            lambda,
            epsilon,
            epsilon_k: EpsilonSequence::default(),
            k_max,
            seed,
        }
    }

    pub fn lemma2(epsilon_k: EpsilonSequence, k_max: usize, seed: u64) -> Self {
        Self {
            regime: BlowupRegime::CriticalLemma2,
            lambda: default_lambda(),
            epsilon: default_epsilon(),
            epsilon_k,
            k_max,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max < 2 {
            return Err(Error::InvalidParameter("k_max must be at least 2".into()));
        }
        match self.regime {
            BlowupRegime::SubcriticalLemma1 => {
                if !(self.lambda > std::f64::consts::SQRT_2) {
                    return Err(Error::InvalidParameter(format!(
                        "lemma-1 weights need lambda > sqrt 2, got {}",
                        self.lambda
                    )));
                }
                if !(self.epsilon > 0.0) {
                    return Err(Error::InvalidParameter("epsilon must be positive".into()));
                }
            }
            BlowupRegime::CriticalLemma2 => {
                let e = self.epsilon_k;
                if !(e.c > 0.0) || !(e.s < 2.0) {
                    return Err(Error::InvalidParameter(
                        "eps_k = c k^(s-2) must decrease to 0: need c > 0 and s < 2".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Time threshold attached to mode `k`: `eps` or `eps_k`.
    pub fn threshold(&self, k: usize) -> f64 {
        match self.regime {
            BlowupRegime::SubcriticalLemma1 => self.epsilon,
            BlowupRegime::CriticalLemma2 => self.epsilon_k.at(k.max(2)),
        }
    }

    /// `sigma_k` for `k = 1..=k_max` (index `k - 1`); mode 1 copies mode 2.
    pub fn sigmas(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let sigma = |k: usize| {
            let kf = k as f64;
            let lk = kf.ln();
            match self.regime {
                BlowupRegime::SubcriticalLemma1 => {
                    kf / (self.lambda * lk.sqrt() * -(-self.epsilon * kf * kf).exp_m1())
                }
                BlowupRegime::CriticalLemma2 => {
                    let e = self.epsilon_k.at(k);
                    kf / ((2.0 * lk).sqrt() * -(-kf * kf * e).exp_m1())
                }
            }
        };
        let mut out: Vec<f64> = (1..=self.k_max).map(|k| sigma(k.max(2))).collect();
        out[0] = out[1];
        Ok(out)
    }
}

/// `tau_k = -log(1 - k / xi_0) / k^2`, or `+inf` when there is no blow-up.
pub fn blowup_time(k: u64, xi0: f64) -> f64 {
    if k == 0 || !(xi0 > k as f64) {
        return f64::INFINITY;
    }
    let kf = k as f64;
    let t = -(-kf / xi0).ln_1p() / (kf * kf);
    if t > 0.0 && t.is_finite() {
        t
    } else {
        f64::INFINITY
    }
}

/// `P[tau_k <= eps]` for `xi_k(0) ~ N(0, sigma^2)`.
pub fn blowup_probability(k: usize, sigma: f64, eps: f64) -> f64 {
    if sigma == 0.0 || !(eps > 0.0) {
        return 0.0;
    }
    let kf = k as f64;
    let x = kf / (sigma * -(-kf * kf * eps).exp_m1());
    upper_tail(x)
}

/// `P[Z >= x]` for a standard normal `Z`.
pub fn upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Result of the adaptive mode integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum OdeOutcome {
    Blowup { time: f64, steps: usize },
    Finite { t_end: f64, value: f64, steps: usize },
}

impl OdeOutcome {
    pub fn blowup_time(&self) -> Option<f64> {
        match *self {
            OdeOutcome::Blowup { time, .. } => Some(time),
            OdeOutcome::Finite { .. } => None,
        }
    }
}

/// |xi| beyond which the mode is declared to have escaped.
pub const ESCAPE_LEVEL: f64 = 1e12;

/// Dormand-Prince 5(4) on `xi' = -k^2 xi + k xi^2` with step rejection.
/// The escape time is extrapolated from the last two accepted points
/// through the zero of `1/xi`, which is linear in `t` near the singularity.
pub fn mode_ode_oracle(k: u64, xi0: f64, t_end: f64, tol: f64) -> Result<OdeOutcome> {
    if !(tol > 0.0) || !(t_end > 0.0) {
        return Err(Error::InvalidParameter("need tol > 0 and t_end > 0".into()));
    }
    let kf = k as f64;
    let f = |x: f64| -kf * kf * x + kf * x * x;
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let (mut t, mut x) = (0.0f64, xi0);
    let mut h = (t_end * 1e-3).min(0.1 / (kf * kf).max(1.0));
    let mut steps = 0usize;
    while t < t_end {
        if steps > 10_000_000 {
            return Err(Error::Numerical("mode integration did not finish".into()));
        }
        h = h.min(t_end - t);
        let mut kv = [0.0f64; 7];
        kv[0] = f(x);
        for s in 0..6 {
            let xs = x + h * (0..=s).map(|i| A[s][i] * kv[i]).sum::<f64>();
            kv[s + 1] = f(xs);
        }
        let x5 = x + h * (0..7).map(|i| B5[i] * kv[i]).sum::<f64>();
        let x4 = x + h * (0..7).map(|i| B4[i] * kv[i]).sum::<f64>();
        let scale = tol * (1.0 + x.abs().max(x5.abs()));
        let err = (x5 - x4).abs() / scale;
        if !x5.is_finite() || err > 1.0 {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.1) } else { 0.1 };
            h *= fac;
            if h < 1e-300 {
                return Err(Error::Numerical("step size underflow".into()));
            }
            continue;
        }
        let prev = (t, x);
        t += h;
        x = x5;
        steps += 1;
        if x.abs() > ESCAPE_LEVEL {
            let (y0, y1) = (1.0 / prev.1, 1.0 / x);
            let time = t - y1 * (t - prev.0) / (y1 - y0);
            return Ok(OdeOutcome::Blowup { time, steps });
        }
        let fac = if err > 0.0 { (0.9 * err.powf(-0.2)).min(5.0) } else { 5.0 };
        h *= fac;
    }
    Ok(OdeOutcome::Finite {
        t_end,
        value: x,
        steps,
    })
}

/// One draw of the initial modes with their blow-up times.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupSample {
    /// `xi_k(0)` for `k = 1..=k_max`.
    pub xi0: Vec<f64>,
    pub tau: Vec<f64>,
    pub inf_tau: f64,
}

/// `xi_k(0) = sigma_k Z_k` with `Z_k` keyed by `(seed, k)`.
pub fn sample_modes(sigmas: &[f64], seed: u64) -> BlowupSample {
    let xi0: Vec<f64> = sigmas
        .iter()
        .enumerate()
        .map(|(i, s)| s * keyed_normals::<1>(seed, i as u64 + 1)[0])
        .collect();
    let tau: Vec<f64> = xi0
        .iter()
        .enumerate()
        .map(|(i, &x)| blowup_time(i as u64 + 1, x))
        .collect();
    let inf_tau = tau.iter().copied().fold(f64::INFINITY, f64::min);
    BlowupSample { xi0, tau, inf_tau }
}

/// `sigma_k` together with one sample drawn with `spec.seed`.
pub fn sample_weights(spec: &BlowupWeightSpec) -> Result<(Vec<f64>, BlowupSample)> {
    let s = spec.sigmas()?;
    let sample = sample_modes(&s, spec.seed);
    Ok((s, sample))
}

/// Per-mode comparison of the analytic and empirical blow-up probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRow {
    pub k: usize,
    pub sigma_k: f64,
    pub threshold: f64,
    pub p_analytic: f64,
    pub p_empirical: f64,
}

/// Empirical law of `inf_{k <= K} tau_k` at one cutoff.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutoffStats {
    pub k_max: usize,
    /// `(eps, P[inf tau <= eps])` over the requested grid.
    pub p_inf_below: Vec<(f64, f64)>,
    pub median_inf_tau: f64,
    /// Mean number of modes with `tau_k <= threshold_k`.
    pub mean_count: f64,
    pub count_std_err: f64,
    /// `sum_k P[tau_k <= threshold_k]`.
    pub expected_count: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma1Verdict {
    pub eps: f64,
    /// Fraction of samples with `min_k tau_k <= eps / 2`.
    pub fraction: f64,
    pub std_err: f64,
    /// `sum_k P[tau_k <= eps]`, which bounds the fraction.
    pub tail_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma2Verdict {
    /// Empirical counts match the expected counts within 3 standard errors.
    pub counts_match: bool,
    /// Counts increase with every doubling of the cutoff.
    pub counts_grow: bool,
    /// `inf tau` decreases in median as the cutoff doubles.
    pub inf_tau_decreases: bool,
    pub divergent_signature: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrichotomyReport {
    pub regime: BlowupRegime,
    pub samples: usize,
    pub cutoffs: Vec<CutoffStats>,
    pub modes: Vec<ModeRow>,
    pub lemma1: Option<Lemma1Verdict>,
    pub lemma2: Option<Lemma2Verdict>,
}

/// Monte Carlo over `samples` draws; cutoffs `k_max / 8, k_max / 4, k_max / 2, k_max`.
pub fn trichotomy_mc(
    spec: &BlowupWeightSpec,
    samples: usize,
    epsilon_grid: &[f64],
) -> Result<TrichotomyReport> {
    if samples < 100 {
        return Err(Error::InvalidParameter("need at least 100 samples".into()));
    }
    let sigmas = spec.sigmas()?;
    let kmax = spec.k_max;
    let draws: Vec<BlowupSample> = (0..samples as u64)
        .into_par_iter()
        .map(|r| sample_modes(&sigmas, derive_seed(spec.seed, r)))
        .collect();
    let m = samples as f64;
    let thresholds: Vec<f64> = (1..=kmax).map(|k| spec.threshold(k)).collect();
    let analytic: Vec<f64> = (1..=kmax)
        .map(|k| blowup_probability(k, sigmas[k - 1], thresholds[k - 1]))
        .collect();
    let modes: Vec<ModeRow> = (1..=kmax)
        .map(|k| {
            let hits = draws.iter().filter(|d| d.tau[k - 1] <= thresholds[k - 1]).count();
            ModeRow {
                k,
                sigma_k: sigmas[k - 1],
                threshold: thresholds[k - 1],
                p_analytic: analytic[k - 1],
                p_empirical: hits as f64 / m,
            }
        })
        .collect();
    let mut levels: Vec<usize> = [8, 4, 2, 1].iter().map(|d| kmax / d).filter(|&k| k >= 2).collect();
    levels.dedup();
    let cutoffs: Vec<CutoffStats> = levels
        .iter()
        .map(|&kc| {
            let mut inf: Vec<f64> = draws
                .iter()
                .map(|d| d.tau[..kc].iter().copied().fold(f64::INFINITY, f64::min))
                .collect();
            let counts: Vec<f64> = draws
                .iter()
                .map(|d| (0..kc).filter(|&i| d.tau[i] <= thresholds[i]).count() as f64)
                .collect();
            let mean_count = counts.iter().sum::<f64>() / m;
            let var = counts.iter().map(|c| (c - mean_count).powi(2)).sum::<f64>() / (m - 1.0);
            let p_inf_below = epsilon_grid
                .iter()
                .map(|&e| (e, inf.iter().filter(|&&t| t <= e).count() as f64 / m))
                .collect();
            inf.sort_by(f64::total_cmp);
            CutoffStats {
                k_max: kc,
                p_inf_below,
                median_inf_tau: inf[inf.len() / 2],
                mean_count,
                count_std_err: (var / m).sqrt(),
                expected_count: analytic[..kc].iter().sum(),
            }
        })
        .collect();
    let (lemma1, lemma2) = match spec.regime {
        BlowupRegime::SubcriticalLemma1 => {
            let eps = spec.epsilon;
            let hits = draws.iter().filter(|d| d.inf_tau <= eps / 2.0).count() as f64 / m;
            let se = (hits * (1.0 - hits) / m).sqrt().max(1.0 / m);
            let tail_bound: f64 = analytic.iter().sum();
            (
                Some(Lemma1Verdict {
                    eps,
                    fraction: hits,
                    std_err: se,
                    tail_bound,
                    holds: hits <= tail_bound + 3.0 * se,
                }),
                None,
            )
        }
        BlowupRegime::CriticalLemma2 => {
            let counts_match = cutoffs
                .iter()
                .all(|c| (c.mean_count - c.expected_count).abs() <= 3.0 * c.count_std_err.max(1.0 / m));
            let counts_grow = cutoffs.windows(2).all(|w| w[1].mean_count > w[0].mean_count);
            let inf_tau_decreases = cutoffs
                .windows(2)
                .all(|w| w[1].median_inf_tau <= w[0].median_inf_tau);
            (
                None,
                Some(Lemma2Verdict {
                    counts_match,
                    counts_grow,
                    inf_tau_decreases,
                    divergent_signature: counts_match && counts_grow,
                }),
            )
        }
    };
    Ok(TrichotomyReport {
        regime: spec.regime,
        samples,
        cutoffs,
        modes,
        lemma1,
        lemma2,
    })
}

/// `Xi = sum_k xi_k(0) sin(kx)` on the lattice of `partition` (modes above `N` dropped).
pub fn xi_field(
    partition: &DyadicPartition,
    sigmas: &[f64],
    seed: u64,
) -> Result<SpectralField> {
    let lat = partition.lattice();
    if lat.d() != 1 {
        return Err(Error::LatticeMismatch("the sine series lives in d = 1".into()));
    }
    let s = sample_modes(sigmas, seed);
    let mut entries = Vec::with_capacity(2 * s.xi0.len());
    for (i, &x) in s.xi0.iter().enumerate().take(lat.n()) {
        let k = i as i64 + 1;
        entries.push(([k, 0], Complex64::new(0.0, -0.5 * x)));
        entries.push(([-k, 0], Complex64::new(0.0, 0.5 * x)));
    }
    SpectralField::from_modes(lat, &entries)
}

/// Block growth of `Xi` over `samples` draws; the reference slope is `3/2`.
pub fn regularity_of_xi(
    spec: &BlowupWeightSpec,
    partition: &DyadicPartition,
    samples: usize,
) -> Result<GrowthProbe> {
    if samples < 50 {
        return Err(Error::InvalidParameter("need at least 50 samples".into()));
    }
    let sigmas = spec.sigmas()?;
    probe_ensemble(partition, samples, 1.5, |r| {
        xi_field(partition, &sigmas, derive_seed(spec.seed, r))
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn closed_form_solves_the_ode() {
        // 1/xi is affine-exponential: y' = k^2 y - k
        let (k, xi0, t) = (3.0f64, 5.0f64, 0.01f64);
        let y = 1.0 / k + (1.0 / xi0 - 1.0 / k) * (k * k * t).exp();
        let x = 1.0 / y;
        let h = 1e-6;
        let y2 = 1.0 / k + (1.0 / xi0 - 1.0 / k) * (k * k * (t + h)).exp();
        let y0 = 1.0 / k + (1.0 / xi0 - 1.0 / k) * (k * k * (t - h)).exp();
        let dx = (1.0 / y2 - 1.0 / y0) / (2.0 * h);
        assert!((dx - (-k * k * x + k * x * x)).abs() < 1e-5 * dx.abs());
    }
}
