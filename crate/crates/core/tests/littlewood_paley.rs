mod common;

use common::{cos_field, lat1, max_diff, random_field};
use num_complex::Complex64;
use proptest::prelude::*;
use roughstart::littlewood_paley::*;
use roughstart::spectral::{convolve, SpectralField, TorusLattice};
use roughstart::time_grid::{GridSpec, TimeGrid, Trajectory};

fn part(d: usize, n: usize) -> DyadicPartition {
    DyadicPartition::new(TorusLattice::new(d, n).unwrap())
}

/// `f < g` assembled from spectral products of blocks.
fn lt_direct(p: &DyadicPartition, f: &SpectralField, g: &SpectralField) -> SpectralField {
    let bf = p.blocks(f).unwrap();
    let bg = p.blocks(g).unwrap();
    let mut acc = SpectralField::zeros(f.lattice());
    let mut low = SpectralField::zeros(f.lattice());
    for n in 2..bf.len() {
        low = low.add(&bf[n - 2]).unwrap();
        acc = acc.add(&convolve(&low, &bg[n]).unwrap()).unwrap();
    }
    acc
}

fn res_direct(p: &DyadicPartition, f: &SpectralField, g: &SpectralField) -> SpectralField {
    let bf = p.blocks(f).unwrap();
    let bg = p.blocks(g).unwrap();
    let mut acc = SpectralField::zeros(f.lattice());
    for a in 0..bf.len() {
        for b in a.saturating_sub(1)..(a + 2).min(bf.len()) {
            acc = acc.add(&convolve(&bf[a], &bg[b]).unwrap()).unwrap();
        }
    }
    acc
}

#[test]
fn partition_of_unity_on_every_mode() {
    for (d, n) in [(1, 200), (2, 40)] {
        let p = part(d, n);
        for (_, k) in p.lattice().modes() {
            assert!((p.partition_sum(k) - 1.0).abs() < 1e-12, "{k:?}");
        }
    }
}

#[test]
fn supports_of_distant_blocks_are_disjoint() {
    let p = part(1, 512);
    for (_, k) in p.lattice().modes() {
        let live: Vec<i32> = p.indices().filter(|&j| p.weight(j, k) > 0.0).collect();
        assert!(live.len() <= 2, "{k:?}: {live:?}");
        if live.len() == 2 {
            assert_eq!(live[1] - live[0], 1);
        }
    }
    for r in [0.0, 0.5, 1.0, 1.3] {
        for j in 1..8 {
            assert!(chi(r) == 0.0 || rho(r / 2f64.powi(j)) == 0.0);
        }
    }
}

#[test]
fn blocks_sum_to_the_field() {
    let p = part(2, 20);
    let f = random_field(p.lattice(), 5, 0.5);
    let mut acc = SpectralField::zeros(p.lattice());
    for b in p.blocks(&f).unwrap() {
        acc = acc.add(&b).unwrap();
    }
    assert!(max_diff(&acc, &f) <= 1e-12 * f.max_abs());
}

#[test]
fn interior_mode_lives_in_one_block() {
    // |k| = 6 lies where rho(k/4) = 1: 3/4 <= 6/8 and 6/4 >= 4/3
    let p = part(1, 64);
    let e = SpectralField::from_modes(p.lattice(), &[([6, 0], Complex64::new(1.0, 0.0))]).unwrap();
    assert!(max_diff(&p.block(&e, 2).unwrap(), &e) < 1e-15);
    for j in p.indices().filter(|&j| (j - 2).abs() > 1) {
        assert_eq!(p.block(&e, j).unwrap().max_abs(), 0.0);
    }
}

#[test]
fn constant_lives_in_the_low_block() {
    let p = part(1, 32);
    let c = SpectralField::from_modes(p.lattice(), &[([0, 0], Complex64::new(2.5, 0.0))]).unwrap();
    assert!(max_diff(&p.block(&c, -1).unwrap(), &c) == 0.0);
    for j in 0..=p.j_max() {
        assert_eq!(p.block(&c, j).unwrap().max_abs(), 0.0);
    }
    // only block -1 contributes: 2^{-alpha} (1 + |-1|^kappa) |c|
    let alpha: f64 = 0.7;
    assert!((p.besov_norm(&c, alpha, 1.3).unwrap() - 2.5 * 2f64.powf(-alpha) * 2.0).abs() < 1e-12);
    assert!((p.besov_norm(&c, alpha, 0.0).unwrap() - 2.5 * 2f64.powf(-alpha)).abs() < 1e-12);
}

#[test]
fn interior_mode_has_unit_plain_norm() {
    let p = part(1, 64);
    let f = cos_field(p.lattice(), 6, 2.0);
    assert!((p.besov_norm(&f, 0.0, 0.0).unwrap() - 2.0).abs() < 1e-10);
}

#[test]
fn block_weights() {
    assert_eq!(block_weight(-1, 0.0), 1.0);
    assert_eq!(block_weight(5, 0.0), 1.0);
    assert_eq!(block_weight(-1, 1.3), 2.0);
    assert_eq!(block_weight(0, 1.3), 1.0);
    assert!((block_weight(4, 1.5) - 9.0).abs() < 1e-12);
}

#[test]
fn paraproduct_of_a_constant_drops_low_blocks() {
    let p = part(1, 64);
    let c = SpectralField::from_modes(p.lattice(), &[([0, 0], Complex64::new(3.0, 0.0))]).unwrap();
    let g = random_field(p.lattice(), 6, 0.5);
    let lhs = p.paraproduct_lt(&c, &g).unwrap();
    let rhs = g
        .sub(&p.block(&g, -1).unwrap())
        .unwrap()
        .sub(&p.block(&g, 0).unwrap())
        .unwrap()
        .scaled(3.0);
    assert!(max_diff(&lhs, &rhs) < 1e-12);
    assert!(max_diff(&lhs, &lt_direct(&p, &c, &g)) < 1e-12);
}

#[test]
fn paraproduct_with_zero() {
    let p = part(1, 32);
    let f = random_field(p.lattice(), 1, 0.0);
    let z = SpectralField::zeros(p.lattice());
    assert_eq!(p.paraproduct_lt(&f, &z).unwrap().max_abs(), 0.0);
}

#[test]
fn resonant_single_modes() {
    let p = part(1, 16);
    let e = cos_field(p.lattice(), 1, 2.0);
    let r = p.resonant(&e, &e).unwrap();
    assert!(max_diff(&r, &res_direct(&p, &e, &e)) < 1e-14);
    // both copies of mode 1 sit in neighbouring blocks, so o catches the whole product
    assert!(max_diff(&r, &convolve(&e, &e).unwrap()) < 1e-14);
}

#[test]
fn weighted_norm_of_constant_trajectory() {
    let p = part(1, 32);
    let u = random_field(p.lattice(), 2, 1.0);
    let grid = TimeGrid::graded(1.0, GridSpec::default()).unwrap();
    let traj = Trajectory::constant(grid, &u);
    let w = weighted_norm(&traj, &WeightedNormParams::new(0.5, 0.0), &p).unwrap();
    assert!((w.value - p.besov_norm(&u, 0.5, 0.0).unwrap()).abs() < 1e-14);
}

fn power_trajectory(u: &SpectralField, exponent: f64, horizon: f64) -> Trajectory {
    let grid = TimeGrid::graded(horizon, GridSpec::default()).unwrap();
    let fields = grid
        .nodes()
        .iter()
        .map(|&t| if t == 0.0 { SpectralField::zeros(u.lattice()) } else { u.scaled(t.powf(exponent)) })
        .collect();
    Trajectory::new(grid, fields).unwrap()
}

#[test]
fn weighted_norm_cancels_the_singularity() {
    let p = part(1, 32);
    let u = random_field(p.lattice(), 3, 1.0);
    let base = p.besov_norm(&u, 0.0, 0.0).unwrap();
    let traj = power_trajectory(&u, -0.3, 0.5);
    let w = weighted_norm(&traj, &WeightedNormParams::new(0.0, 0.3), &p).unwrap();
    assert!((w.value - base).abs() < 1e-12 * base);
    let w = weighted_norm(&traj, &WeightedNormParams::new(0.0, 0.5), &p).unwrap();
    assert!((w.value - 0.5f64.powf(0.2) * base).abs() < 1e-12 * base);
    assert_eq!(w.argmax_t, 0.5);
}

#[test]
fn vanishing_examples() {
    let p = part(1, 32);
    let u = random_field(p.lattice(), 4, 1.0);
    let rising = power_trajectory(&u, 0.1, 1.0);
    assert!(vanishing_check(&rising, &WeightedNormParams::new(0.0, 0.0), &p, 1e-3).unwrap().vanishes);
    let flat = power_trajectory(&u, -0.25, 1.0);
    let r = vanishing_check(&flat, &WeightedNormParams::new(0.0, 0.25), &p, 1e-3).unwrap();
    assert!(!r.vanishes);
    let uniform = Trajectory::constant(TimeGrid::uniform(1.0, 5).unwrap(), &u);
    assert!(vanishing_check(&uniform, &WeightedNormParams::new(0.0, 0.0), &p, 1e-3).is_err());
}

#[test]
fn block_series_rows() {
    let p = part(1, 32);
    let u = random_field(p.lattice(), 4, 1.0);
    let traj = Trajectory::constant(TimeGrid::uniform(1.0, 3).unwrap(), &u);
    let rows = block_series(&traj, &p, 0.0, 0.0).unwrap();
    assert_eq!(rows.len(), 4 * (p.j_max() as usize + 2));
    assert!(rows.iter().all(|r| (r.norm - p.besov_norm(&u, 0.0, 0.0).unwrap()).abs() < 1e-14));
}

#[test]
fn log_weighted_norm_is_a_quasi_algebra_on_samples() {
    let p = part(1, 256);
    let kappa = 1.5;
    let mut worst: f64 = 0.0;
    for s in 0..10 {
        let f = random_field(p.lattice(), 100 + s, 1.2);
        let g = random_field(p.lattice(), 200 + s, 1.2);
        let fg = convolve(&f, &g).unwrap();
        let ratio = p.besov_norm(&fg, 0.0, kappa).unwrap()
            / (p.besov_norm(&f, 0.0, kappa).unwrap() * p.besov_norm(&g, 0.0, kappa).unwrap());
        worst = worst.max(ratio);
    }
    println!("empirical quasi-algebra constant {worst:.3}");
    assert!(worst.is_finite() && worst < 4.0);
}

fn arb_field(n: usize) -> impl Strategy<Value = SpectralField> {
    (any::<u64>(), 0.0..2.0f64).prop_map(move |(s, decay)| random_field(lat1(n), s, decay))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn bony_decomposition(f in arb_field(64), g in arb_field(64)) {
        let p = part(1, 64);
        let sum = p.paraproduct_lt(&f, &g).unwrap()
            .add(&p.resonant(&f, &g).unwrap()).unwrap()
            .add(&p.paraproduct_gt(&f, &g).unwrap()).unwrap();
        let prod = convolve(&f, &g).unwrap();
        prop_assert!(max_diff(&sum, &prod) <= 1e-11 * prod.max_abs());
    }

    #[test]
    fn paraproducts_match_block_sums(f in arb_field(24), g in arb_field(24)) {
        let p = part(1, 24);
        let lt = p.paraproduct_lt(&f, &g).unwrap();
        prop_assert!(max_diff(&lt, &lt_direct(&p, &f, &g)) < 1e-12);
        let r = p.resonant(&f, &g).unwrap();
        prop_assert!(max_diff(&r, &res_direct(&p, &f, &g)) < 1e-12);
        prop_assert!(max_diff(&r, &p.resonant(&g, &f).unwrap()) < 1e-13);
    }

    #[test]
    fn norm_is_subadditive(f in arb_field(32), g in arb_field(32), alpha in -1.0..1.0f64) {
        let p = part(1, 32);
        let s = p.besov_norm(&f.add(&g).unwrap(), alpha, 0.0).unwrap();
        let bound = p.besov_norm(&f, alpha, 0.0).unwrap() + p.besov_norm(&g, alpha, 0.0).unwrap();
        prop_assert!(s <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn embeddings(f in arb_field(64), alpha in -1.0..1.0f64, eps in 0.05..0.5f64, kappa in 0.5..2.0f64) {
        let p = part(1, 64);
        let plain = p.besov_norm(&f, alpha, 0.0).unwrap();
        let logw = p.besov_norm(&f, alpha, kappa).unwrap();
        let finer = p.besov_norm(&f, alpha + eps, 0.0).unwrap();
        prop_assert!(plain <= logw * (1.0 + 1e-12));
        // the j = -1 weight 2^{-alpha} shrinks with alpha
        prop_assert!(plain <= 2f64.powf(eps) * finer * (1.0 + 1e-12));
        let c = p.indices().map(|j| block_weight(j, kappa) * 2f64.powf(-(j as f64) * eps)).fold(0.0, f64::max);
        prop_assert!(logw <= c * finer * (1.0 + 1e-12));
    }

    #[test]
    fn mean_projection_contracts_every_norm(f in arb_field(32), alpha in -1.0..1.0f64, kappa in 0.0..2.0f64) {
        let p = part(1, 32);
        let g = roughstart::spectral::project_mean_zero(&f);
        prop_assert!(p.besov_norm(&g, alpha, kappa).unwrap() <= p.besov_norm(&f, alpha, kappa).unwrap() * (1.0 + 1e-12));
    }
}
