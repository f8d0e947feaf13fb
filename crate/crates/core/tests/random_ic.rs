use proptest::prelude::*;
use roughstart::littlewood_paley::DyadicPartition;
use roughstart::random_ic::*;
use roughstart::spectral::TorusLattice;

fn lat(d: usize, n: usize) -> TorusLattice {
    TorusLattice::new(d, n).unwrap()
}

#[test]
fn weights() {
    let s = GaussianIcSpec::new(0.5, 0);
    assert_eq!(s.weight([0, 0]), 0.0);
    assert!((s.weight([4, 0]) - 2.0).abs() < 1e-15);
    let l = s.with_log(1.0);
    assert!((l.weight([4, 0]) - 2.0 * 5f64.ln().powf(-1.5)).abs() < 1e-15);
    assert!((s.weight([3, 4]) - 5f64.sqrt()).abs() < 1e-15);
    assert_eq!(s.regularity(1), -1.0);
}

#[test]
fn mode_variance_matches_weight() {
    let spec = GaussianIcSpec::new(0.5, 77);
    let l = lat(1, 4);
    let m = 10_000;
    let samples: Vec<_> = (0..m)
        .map(|r| sample_ic(&spec.with_seed(derive_seed(77, r)), l).unwrap())
        .collect();
    for k in 1..=4i64 {
        let v: Vec<f64> = samples.iter().map(|f| f.coeff([k, 0]).norm_sqr()).collect();
        let mean = v.iter().sum::<f64>() / m as f64;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0)).sqrt();
        let se = sd / (m as f64).sqrt();
        let target = spec.weight([k, 0]).powi(2);
        assert!((mean - target).abs() <= 3.0 * se, "k = {k}: {mean} vs {target} (se {se})");
    }
}

#[test]
fn samples_are_real_mean_zero_and_reproducible() {
    let spec = GaussianIcSpec::new(0.3, 5);
    for d in [1, 2] {
        let a = sample_ic(&spec, lat(d, 12)).unwrap();
        assert!(a.is_hermitian() && a.is_mean_zero());
        assert_eq!(a.coeff([0, 0]).norm(), 0.0);
        let b = sample_ic(&spec, lat(d, 12)).unwrap();
        assert_eq!(a, b);
    }
    let other = sample_ic(&spec.with_seed(6), lat(1, 12)).unwrap();
    assert_ne!(other, sample_ic(&spec, lat(1, 12)).unwrap());
}

#[test]
fn sample_does_not_depend_on_thread_count() {
    let spec = GaussianIcSpec::new(0.5, 9);
    let part = DyadicPartition::new(lat(1, 256));
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| block_growth_probe(&spec, &part, 16).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn plain_growth_slope() {
    let spec = GaussianIcSpec::new(0.5, 11);
    let p = block_growth_probe(&spec, &DyadicPartition::new(lat(1, 4096)), 48).unwrap();
    assert!((p.slope - 1.0).abs() <= 0.05, "slope {}", p.slope);
    assert_eq!(p.reference_slope, 1.0);
}

#[test]
fn log_corrected_growth() {
    let spec = GaussianIcSpec::new(0.5, 12).with_log(1.0);
    let p = block_growth_probe(&spec, &DyadicPartition::new(lat(1, 4096)), 48).unwrap();
    assert!((p.joint.0 - 1.0).abs() <= 0.1, "slope {}", p.joint.0);
    assert!((p.log_exponent + 1.0).abs() <= 0.25, "log exponent {}", p.log_exponent);
}

#[test]
fn flat_blocks_at_minus_half() {
    let spec = GaussianIcSpec::new(-0.5, 13);
    let p = block_growth_probe(&spec, &DyadicPartition::new(lat(1, 4096)), 48).unwrap();
    assert!(p.slope.abs() <= 0.05, "slope {}", p.slope);
}

fn median_norm(theta: f64, n: usize, alpha: f64) -> f64 {
    let part = DyadicPartition::new(lat(1, n));
    let mut v: Vec<f64> = (0..31)
        .map(|r| {
            let u = sample_ic(&GaussianIcSpec::new(theta, derive_seed(21, r)), part.lattice()).unwrap();
            part.besov_norm(&u, alpha, 0.0).unwrap()
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v[15]
}

#[test]
fn holder_proxy_below_and_above_the_threshold() {
    // theta = 0 puts the threshold at -1/2
    let below = [median_norm(0.0, 1024, -0.8), median_norm(0.0, 2048, -0.8)];
    assert!((below[1] / below[0] - 1.0).abs() < 0.1, "{below:?}");
    let above = [median_norm(0.0, 1024, 0.0), median_norm(0.0, 4096, 0.0)];
    // two extra blocks at rate 2^{(alpha + 1/2) j}
    assert!(above[1] / above[0] >= 2f64.powf(0.5 * 2.0) * 0.8, "{above:?}");
}

fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn disjoint_seed_ranges_agree() {
    let part = DyadicPartition::new(lat(1, 128));
    let spec = GaussianIcSpec::new(0.5, 0);
    let sups = |range: std::ops::Range<u64>, j: usize| -> Vec<f64> {
        range
            .map(|s| part.block_sups(&sample_ic(&spec.with_seed(derive_seed(1, s)), part.lattice()).unwrap()).unwrap()[j])
            .collect()
    };
    let (n, m) = (200.0, 200.0);
    let crit = 1.628 * f64::sqrt((n + m) / (n * m));
    for j in [2, 4, 6] {
        let d = ks_statistic(&mut sups(0..200, j), &mut sups(10_000..10_200, j));
        assert!(d < crit, "block {j}: D = {d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nested_lattices_share_modes(seed in any::<u64>(), theta in -1.0..1.0f64) {
        let spec = GaussianIcSpec::new(theta, seed);
        let a = sample_ic(&spec, lat(2, 4)).unwrap();
        let b = sample_ic(&spec, lat(2, 9)).unwrap();
        for (i, k) in a.lattice().modes() {
            prop_assert_eq!(a.coeffs()[i], b.coeff(k));
        }
    }

    #[test]
    fn every_sample_is_real_with_zero_mean(seed in any::<u64>(), theta in -1.0..1.0f64) {
        let u = sample_ic(&GaussianIcSpec::new(theta, seed).with_log(0.5), lat(1, 32)).unwrap();
        prop_assert!(u.is_hermitian() && u.is_mean_zero());
    }

    #[test]
    fn derived_seeds_do_not_collide(seed in any::<u64>(), a in 0u64..1000, b in 0u64..1000) {
        prop_assume!(a != b);
        prop_assert_ne!(derive_seed(seed, a), derive_seed(seed, b));
    }
}
