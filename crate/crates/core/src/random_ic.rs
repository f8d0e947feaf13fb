//! Gaussian initial data `u_0 = sum_k phi_k xi_k e_k` with
//! `phi_k = |k|^theta`, optionally times `(log(1 + |k|))^{-nu - 1/2}`.
//!
//! Each `xi_k` is drawn from a counter-based stream keyed by `(seed, k)` on
//! the positive half-lattice and mirrored by conjugation, so the sample does
//! not depend on `N`, thread count or evaluation order.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{linear_fit, two_regressor_fit};
use crate::littlewood_paley::DyadicPartition;
use crate::spectral::{Mode, SpectralField, TorusLattice};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianIcSpec {
    pub theta: f64,
    /// Exponent `nu` of the logarithmic correction; `None` for plain weights.
    #[serde(default)]
    pub log_nu: Option<f64>,
    #[serde(default = "one")]
    pub amplitude: f64,
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

impl GaussianIcSpec {
    pub fn new(theta: f64, seed: u64) -> Self {
        Self {
            theta,
            log_nu: None,
            amplitude: 1.0,
            seed,
        }
    }

    pub fn with_log(mut self, nu: f64) -> Self {
        self.log_nu = Some(nu);
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// `phi_k`; zero at `k = 0`.
    pub fn weight(&self, k: Mode) -> f64 {
        if k == [0, 0] {
            return 0.0;
        }
        let r = TorusLattice::abs(k);
        let mut w = self.amplitude * r.powf(self.theta);
        if let Some(nu) = self.log_nu {
            w *= (1.0 + r).ln().powf(-nu - 0.5);
        }
        w
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || !self.amplitude.is_finite() {
            return Err(Error::InvalidParameter("theta and amplitude must be finite".into()));
        }
        if matches!(self.log_nu, Some(nu) if !nu.is_finite()) {
            return Err(Error::InvalidParameter("nu must be finite".into()));
        }
        Ok(())
    }

    /// Holder exponent below which the samples lie almost surely, `-(theta + d/2)`.
    pub fn regularity(&self, d: usize) -> f64 {
        -(self.theta + d as f64 / 2.0)
    }
}

fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}

/// Stream id of a mode, independent of the lattice size.
pub fn mode_key(k: Mode) -> u64 {
    (zigzag(k[0]) << 32) | (zigzag(k[1]) & 0xffff_ffff)
}

/// Deterministic per-replica seed.
pub fn derive_seed(seed: u64, replica: u64) -> u64 {
    // splitmix64 finaliser on a combined word
    let mut z = seed
        .wrapping_add(replica.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent real standard normals for a `(seed, key)` pair.
pub fn keyed_normals<const C: usize>(seed: u64, key: u64) -> [f64; C] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    std::array::from_fn(|_| StandardNormal.sample(&mut rng))
}

/// `xi_k = (g_1 + i g_2)/sqrt(2)` for `k` in the positive half, conjugated otherwise.
pub fn xi(seed: u64, k: Mode) -> Complex64 {
    if k == [0, 0] {
        return Complex64::new(0.0, 0.0);
    }
    let positive = TorusLattice::is_positive_half(k);
    let key = if positive { k } else { [-k[0], -k[1]] };
    let [g1, g2] = keyed_normals::<2>(seed, mode_key(key));
    let z = Complex64::new(g1, g2) * std::f64::consts::FRAC_1_SQRT_2;
    if positive {
        z
    } else {
        z.conj()
    }
}

/// One sample of the Gaussian initial condition.
pub fn sample_ic(spec: &GaussianIcSpec, lattice: TorusLattice) -> Result<SpectralField> {
    spec.validate()?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); lattice.len()];
    for (i, k) in lattice.modes() {
        if TorusLattice::is_positive_half(k) {
            let c = xi(spec.seed, k) * spec.weight(k);
            coeffs[i] = c;
            coeffs[lattice.mirror(i)] = c.conj();
        }
    }
    let mut f = SpectralField::from_coeffs(lattice, coeffs)?;
    f.symmetrize();
    Ok(f)
}

/// Summary of `||Delta_j u||_inf` across samples for one block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockStats {
    pub j: i32,
    pub mean: f64,
    pub p05: f64,
    pub p50: f64,
    pub p95: f64,
}

/// Per-block statistics and fitted growth exponents in base 2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthProbe {
    pub blocks: Vec<BlockStats>,
    /// Blocks used in the fits.
    pub fit_range: (i32, i32),
    /// Slope of `log2 mean_j` against `j`.
    pub raw_slope: f64,
    /// Slope after removing the `sqrt(j)` of a Gaussian supremum.
    pub slope: f64,
    /// Exponent `e` in `mean_j ~ 2^{s j} j^e` with `s` fixed to the reference slope.
    pub log_exponent: f64,
    /// Joint fit `(s, e)`.
    pub joint: (f64, f64),
    pub reference_slope: f64,
}

pub(crate) fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let x = p * (n - 1) as f64;
    let i = x.floor() as usize;
    let f = x - i as f64;
    if i + 1 >= n {
        sorted[n - 1]
    } else {
        sorted[i] * (1.0 - f) + sorted[i + 1] * f
    }
}

/// Largest block index whose annulus lies inside the lattice.
pub fn last_full_block(lattice: TorusLattice) -> i32 {
    let n = lattice.n() as f64;
    let mut j = 0;
    while 2f64.powi(j + 1) * 8.0 / 3.0 <= n {
        j += 1;
    }
    j
}

/// Block statistics of an ensemble of fields and the growth fits over
/// `j in [3, J]`, `J` the last block fully resolved by the lattice.
pub fn probe_ensemble(
    partition: &DyadicPartition,
    samples: usize,
    reference_slope: f64,
    make: impl Fn(u64) -> Result<SpectralField> + Sync,
) -> Result<GrowthProbe> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let sups: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|r| partition.block_sups(&make(r)?))
        .collect::<Result<_>>()?;
    let blocks: Vec<BlockStats> = partition
        .indices()
        .enumerate()
        .map(|(b, j)| {
            let mut v: Vec<f64> = sups.iter().map(|s| s[b]).collect();
            v.sort_by(f64::total_cmp);
            BlockStats {
                j,
                mean: v.iter().sum::<f64>() / v.len() as f64,
                p05: quantile(&v, 0.05),
                p50: quantile(&v, 0.5),
                p95: quantile(&v, 0.95),
            }
        })
        .collect();
    let hi = last_full_block(partition.lattice());
    let lo = 3;
    if hi - lo < 2 {
        return Err(Error::InvalidParameter(format!(
            "lattice N = {} too small for a growth fit",
            partition.lattice().n()
        )));
    }
    let used: Vec<&BlockStats> = blocks.iter().filter(|b| b.j >= lo && b.j <= hi).collect();
    let js: Vec<f64> = used.iter().map(|b| b.j as f64).collect();
    let lj: Vec<f64> = js.iter().map(|j| j.log2()).collect();
    let y: Vec<f64> = used.iter().map(|b| b.mean.log2()).collect();
    let raw = linear_fit(&js, &y)?.slope;
    let y_prof: Vec<f64> = y.iter().zip(&lj).map(|(y, l)| y - 0.5 * l).collect();
    let slope = linear_fit(&js, &y_prof)?.slope;
    let y_log: Vec<f64> = y.iter().zip(&js).map(|(y, j)| y - reference_slope * j).collect();
    let log_exponent = linear_fit(&lj, &y_log)?.slope;
    let c = two_regressor_fit(&js, &lj, &y)?;
    Ok(GrowthProbe {
        blocks,
        fit_range: (lo, hi),
        raw_slope: raw,
        slope,
        log_exponent,
        joint: (c[1], c[2]),
        reference_slope,
    })
}

/// Growth of `||Delta_j u_0||_inf` over `samples` replicas; reference slope `theta + d/2`.
pub fn block_growth_probe(
    spec: &GaussianIcSpec,
    partition: &DyadicPartition,
    samples: usize,
) -> Result<GrowthProbe> {
    let lat = partition.lattice();
    let reference = spec.theta + lat.d() as f64 / 2.0;
    probe_ensemble(partition, samples, reference, |r| {
        sample_ic(&spec.with_seed(derive_seed(spec.seed, r)), lat)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_is_hermitian_and_mean_zero() {
        let lat = TorusLattice::new(2, 6).unwrap();
        let u = sample_ic(&GaussianIcSpec::new(0.5, 3), lat).unwrap();
        assert!(u.is_hermitian() && u.is_mean_zero());
    }

    #[test]
    fn nested_lattices_share_modes() {
        let spec = GaussianIcSpec::new(0.0, 11);
        let a = sample_ic(&spec, TorusLattice::new(1, 8).unwrap()).unwrap();
        let b = sample_ic(&spec, TorusLattice::new(1, 16).unwrap()).unwrap();
        for k in -8..=8 {
            assert_eq!(a.coeff([k, 0]), b.coeff([k, 0]));
        }
    }
}
