#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roughstart::spectral::{SpectralField, TorusLattice};

/// Random real field with coefficients of size `(1+|k|)^-decay`.
pub fn random_field(lat: TorusLattice, seed: u64, decay: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::from_fn(lat, |k| {
        let s = (1.0 + TorusLattice::abs(k)).powf(-decay);
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * s
    });
    f.symmetrize();
    f
}

pub fn cos_field(lat: TorusLattice, k: i64, amp: f64) -> SpectralField {
    let c = Complex64::new(0.5 * amp, 0.0);
    SpectralField::from_modes(lat, &[([k, 0], c), ([-k, 0], c)]).unwrap()
}

pub fn sin_field(lat: TorusLattice, k: i64, amp: f64) -> SpectralField {
    let c = Complex64::new(0.0, 0.5 * amp);
    SpectralField::from_modes(lat, &[([k, 0], -c), ([-k, 0], c)]).unwrap()
}

pub fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn lat1(n: usize) -> TorusLattice {
    TorusLattice::new(1, n).unwrap()
}
