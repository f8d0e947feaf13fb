mod common;

use common::{cos_field, lat1, max_diff, random_field};
use num_complex::Complex64;
use proptest::prelude::*;
use roughstart::spectral::*;

#[test]
fn lattice_counts() {
    assert_eq!(TorusLattice::new(1, 5).unwrap().len(), 11);
    assert_eq!(TorusLattice::new(2, 5).unwrap().len(), 121);
    assert!(TorusLattice::new(3, 5).is_err());
    assert!(TorusLattice::new(1, 1).is_err());
}

#[test]
fn square_of_two_cos() {
    let lat = lat1(8);
    let f = cos_field(lat, 1, 2.0);
    let p = convolve(&f, &f).unwrap();
    assert!((p.coeff([0, 0]) - 2.0).norm() < 1e-14);
    assert!((p.coeff([2, 0]) - 1.0).norm() < 1e-14);
    assert!((p.coeff([-2, 0]) - 1.0).norm() < 1e-14);
    let rest: f64 = lat
        .modes()
        .filter(|(_, k)| ![0, 2, -2].contains(&k[0]))
        .map(|(i, _)| p.coeffs()[i].norm())
        .sum();
    assert!(rest < 1e-14);
}

#[test]
fn unit_is_neutral() {
    let lat = TorusLattice::new(2, 6).unwrap();
    let g = random_field(lat, 1, 1.0);
    let one = SpectralField::from_modes(lat, &[([0, 0], Complex64::new(1.0, 0.0))]).unwrap();
    assert!(max_diff(&convolve(&one, &g).unwrap(), &g) < 1e-13);
}

#[test]
fn product_matches_pointwise_values() {
    // product of two N=8 polynomials lives on N=16 without truncation
    let small = lat1(8);
    let big = lat1(16);
    let f = random_field(small, 2, 0.0);
    let g = random_field(small, 3, 0.0);
    let p = convolve(&f.resized(big).unwrap(), &g.resized(big).unwrap()).unwrap();
    let scale = (0..64)
        .map(|i| (f.eval([i as f64 * std::f64::consts::TAU / 64.0, 0.0]) * g.eval([i as f64 * std::f64::consts::TAU / 64.0, 0.0])).norm())
        .fold(0.0, f64::max);
    for i in 0..64 {
        let x = [i as f64 * std::f64::consts::TAU / 64.0, 0.0];
        let err = (p.eval(x) - f.eval(x) * g.eval(x)).norm();
        assert!(err <= 1e-12 * scale, "x = {x:?}: {err}");
    }
}

#[test]
fn derivative_multiplier_examples() {
    let lat = lat1(4);
    let e1 = SpectralField::from_modes(lat, &[([1, 0], Complex64::new(1.0, 0.0))]).unwrap();
    assert!(max_diff(&derivative_multiplier(&e1, 2.0), &e1) < 1e-15);
    let f = cos_field(lat, 2, 2.0);
    assert!(max_diff(&derivative_multiplier(&f, 1.0), &f.scaled(2.0)) < 1e-15);
    let e0 = SpectralField::from_modes(lat, &[([0, 0], Complex64::new(1.0, 0.0))]).unwrap();
    assert_eq!(derivative_multiplier(&e0, 1.0).max_abs(), 0.0);
}

#[test]
fn mean_projection_examples() {
    let lat = lat1(4);
    let one = SpectralField::from_modes(lat, &[([0, 0], Complex64::new(1.0, 0.0))]).unwrap();
    let f = one.add(&cos_field(lat, 1, 1.0)).unwrap();
    assert!(max_diff(&project_mean_zero(&f), &cos_field(lat, 1, 1.0)) == 0.0);
    assert_eq!(project_mean_zero(&one).max_abs(), 0.0);
    let g = project_mean_zero(&f);
    assert!(max_diff(&project_mean_zero(&g), &g) == 0.0);
}

#[test]
fn sup_norm_examples() {
    let lat = lat1(4);
    assert!((sup_norm(&cos_field(lat, 1, 2.0)).unwrap() - 2.0).abs() < 1e-10);
    let three = SpectralField::from_modes(lat, &[([0, 0], Complex64::new(3.0, 0.0))]).unwrap();
    assert!((sup_norm(&three).unwrap() - 3.0).abs() < 1e-12);
    let f = random_field(lat1(16), 9, 0.5);
    let a = sup_norm(&f).unwrap();
    let b = sup_norm_oversampled(&f, 16).unwrap();
    assert!((a - b).abs() <= 1e-6 * b);
}

#[test]
fn sup_norm_rejects_complex_fields() {
    let lat = lat1(4);
    let f = SpectralField::from_modes(lat, &[([1, 0], Complex64::new(1.0, 0.0))]).unwrap();
    assert!(sup_norm(&f).is_err());
}

#[test]
fn json_roundtrip() {
    let f = random_field(TorusLattice::new(2, 3).unwrap(), 4, 1.0);
    let g = SpectralField::from_json(&f.to_json().unwrap()).unwrap();
    assert_eq!(f, g);
}

#[test]
fn mismatched_lattices_are_rejected() {
    let f = random_field(lat1(4), 1, 1.0);
    let g = random_field(lat1(5), 1, 1.0);
    assert!(convolve(&f, &g).is_err());
}

fn arb_field(d: usize, n: usize) -> impl Strategy<Value = SpectralField> {
    any::<u64>().prop_map(move |s| random_field(TorusLattice::new(d, n).unwrap(), s, 0.5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fft_product_equals_direct_sum(f in arb_field(1, 32), g in arb_field(1, 32)) {
        let a = convolve(&f, &g).unwrap();
        let b = convolve_direct(&f, &g).unwrap();
        prop_assert!(max_diff(&a, &b) <= 1e-13 * b.max_abs().max(1.0));
    }

    #[test]
    fn fft_product_equals_direct_sum_2d(f in arb_field(2, 6), g in arb_field(2, 6)) {
        let a = convolve(&f, &g).unwrap();
        let b = convolve_direct(&f, &g).unwrap();
        prop_assert!(max_diff(&a, &b) <= 1e-13 * b.max_abs().max(1.0));
    }

    #[test]
    fn product_is_symmetric_bilinear_hermitian(f in arb_field(1, 12), g in arb_field(1, 12), h in arb_field(1, 12), c in -3.0..3.0f64) {
        let fg = convolve(&f, &g).unwrap();
        prop_assert!(max_diff(&fg, &convolve(&g, &f).unwrap()) < 1e-13);
        prop_assert!(fg.is_hermitian());
        let lhs = convolve(&f.add(&h.scaled(c)).unwrap(), &g).unwrap();
        let rhs = fg.add(&convolve(&h, &g).unwrap().scaled(c)).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn operators_keep_real_fields_real(f in arb_field(2, 5), s in 0.0..3.0f64) {
        prop_assert!(derivative_multiplier(&f, s).is_hermitian());
        let p = project_mean_zero(&f);
        prop_assert!(p.is_hermitian() && p.is_mean_zero());
    }

    #[test]
    fn physical_roundtrip(f in arb_field(1, 10)) {
        let m = 32;
        let g = SpectralField::from_physical(f.lattice(), f.to_physical(m), m);
        prop_assert!(max_diff(&f, &g) < 1e-14);
    }
}
