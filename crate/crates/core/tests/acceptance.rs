//! The ten acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are expected to fail; the run
//! exits non-zero when any other criterion fails or a listed one passes.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roughstart::blowup::*;
use roughstart::criticality::{asymptotic_check, chi_exponents, classify, golden_table, q, qf, Q, Regime};
use roughstart::equations::{EquationKind, EquationSpec};
use roughstart::fit::linear_fit;
use roughstart::littlewood_paley::{weighted_norm, DyadicPartition, WeightedNormParams};
use roughstart::random_ic::{sample_ic, GaussianIcSpec};
use roughstart::solver::*;
use roughstart::spectral::{convolve, SpectralField, TorusLattice};
use roughstart::stochastic::*;
use roughstart::time_grid::Trajectory;

const KNOWN_UNATTAINABLE: &[usize] = &[6];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Check = fn() -> Result<Outcome, roughstart::error::Error>;

fn c1_golden_table() -> Result<Outcome, roughstart::error::Error> {
    let expected = [
        ("surface_growth", [4, 0, 2, 1, 1], q(3, 4), 0),
        ("kpz", [2, 0, 0, 1, 1], q(1, 2), 0),
        ("kuramoto_sivashinsky", [4, 2, 0, 1, 1], q(1, 4), 2),
        ("reaction_diffusion", [2, 2, 0, 0, 0], q(0, 1), 2),
    ];
    let mut ok = true;
    let golden = golden_table();
    for (kind, (name, v, del, sig)) in EquationKind::CATALOGUE.iter().take(4).zip(expected) {
        let spec = EquationSpec::catalogue(*kind, 1)?;
        let r = classify(&spec, None)?;
        let vals: [Q; 5] = [spec.tau, spec.sigma, spec.a, spec.b, r.alpha_min];
        ok &= kind.name() == name
            && vals == v.map(Q::from)
            && r.delta == del
            && spec.sigma == Q::from(sig)
            && golden.iter().any(|g| g.equation == name && g.delta == del && g.alpha == r.alpha_min);
        if matches!(kind, EquationKind::KuramotoSivashinsky | EquationKind::ReactionDiffusion) {
            ok &= r.r_threshold_fix1 == Q::from(-1);
        }
        if *kind == EquationKind::KuramotoSivashinsky {
            ok &= r.regime == Regime::RandomIcHelps;
        }
    }
    Ok(outcome(ok, "SG, KPZ, KS, RD rows exact".into()))
}

fn c2_burgers_anchor() -> Result<Outcome, roughstart::error::Error> {
    let spec = EquationSpec::generic(Q::from(2), Q::from(1), Q::from(0), 1, true)?;
    let b = chi_exponents(&spec, q(1, 2)).beta0(Q::from(0)) - Q::from(1);
    Ok(outcome(b == q(1, 4), format!("beta0(0) - 1 = {b}")))
}

fn c3_bony() -> Result<Outcome, roughstart::error::Error> {
    let lat = TorusLattice::new(1, 64)?;
    let part = DyadicPartition::new(lat);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut field = || {
            let mut f = SpectralField::from_fn(lat, |k| {
                let w = (1.0 + k[0].abs() as f64).powf(-0.5);
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w
            });
            f.symmetrize();
            f
        };
        let (f, g) = (field(), field());
        let prod = convolve(&f, &g)?;
        let split = part
            .paraproduct_lt(&f, &g)?
            .add(&part.resonant(&f, &g)?)?
            .add(&part.paraproduct_lt(&g, &f)?)?;
        let err = prod.sub(&split)?.l2() / prod.l2();
        worst = worst.max(err);
    }
    Ok(outcome(worst <= 1e-11, format!("max relative error {worst:.2e}")))
}

fn c4_schauder() -> Result<Outcome, roughstart::error::Error> {
    let lat = TorusLattice::new(1, 4096)?;
    let part = DyadicPartition::new(lat);
    let u = SpectralField::from_fn(lat, |k| {
        if k[0] == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / k[0].abs() as f64, 0.0)
        }
    });
    let times = roughstart::fit::log_space(1e-4, 1e-1, 16);
    let mut ok = true;
    let mut detail = Vec::new();
    for (tau, beta) in [(2, 1.0), (4, 1.0), (4, 2.0)] {
        let spec = EquationSpec::generic(Q::from(tau), Q::from(1), Q::from(0), 1, true)?;
        let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
        let ly = times
            .iter()
            .map(|&t| Ok(part.besov_norm(&spec.semigroup_apply(&u, t)?, beta, 0.0)?.ln()))
            .collect::<Result<Vec<f64>, roughstart::error::Error>>()?;
        let slope = linear_fit(&lx, &ly)?.slope;
        let target = -beta / tau as f64;
        ok &= (slope - target).abs() <= 0.05;
        detail.push(format!("(tau {tau}, beta {beta}): {slope:.4} vs {target:.4}"));
    }
    Ok(outcome(ok, detail.join("; ")))
}

fn c5_wick() -> Result<Outcome, roughstart::error::Error> {
    let spec = EquationSpec::catalogue(EquationKind::Burgers, 1)?;
    let part = DyadicPartition::new(TorusLattice::new(1, 256)?);
    let ic = GaussianIcSpec::new(0.5, 2024);
    let mut worst: f64 = 0.0;
    for j in [2, 4, 6] {
        for t in [1e-3, 1e-2] {
            let exact = exact_second_moment(&spec, &ic, &part, Chaos::Eta1, j, t)?;
            let mc = mc_second_moment(&spec, &ic, &part, j, t, 2000)?;
            worst = worst.max(((mc.mean - exact) / mc.std_err).abs());
        }
    }
    Ok(outcome(worst <= 4.0, format!("max |z| = {worst:.2} over 6 points")))
}

fn c6_singularity() -> Result<Outcome, roughstart::error::Error> {
    let spec = EquationSpec::catalogue(EquationKind::Burgers, 1)?;
    let part = DyadicPartition::new(TorusLattice::new(1, 256)?);
    let ic = GaussianIcSpec::new(0.5, 6);
    let window = default_window(&spec, part.lattice());
    let b0 = qf(chi_exponents(&spec, q(1, 2)).beta0(Q::from(0)));
    let fit = |chaos, est| singularity_fit(&spec, &ic, &part, chaos, 0.0, est, window, 12);
    let exact = fit(Chaos::Eta1, Estimator::ExactMoments)?.exponent;
    let mc = fit(Chaos::Eta1, Estimator::MonteCarlo { samples: 500 })?.exponent;
    let det = fit(Chaos::Eta1, Estimator::Deterministic)?.exponent;
    let eta2 = fit(Chaos::Eta2, Estimator::ExactMoments)?.exponent;
    let pass = exact <= b0 + 0.1 && mc <= b0 + 0.1 && det >= 0.9 && eta2 <= 0.35;
    Ok(outcome(
        pass,
        format!(
            "eta1 exact {exact:.3}, ensemble {mc:.3} (bound {:.2}); deterministic {det:.3} (>= 0.9); \
             eta2 {eta2:.3} (bound 0.35)",
            b0 + 0.1
        ),
    ))
}

fn c7_fixed_points() -> Result<Outcome, roughstart::error::Error> {
    let mut detail = Vec::new();
    // fix1 against ETD
    let burgers = EquationSpec::catalogue(EquationKind::Burgers, 1)?;
    let lat = TorusLattice::new(1, 32)?;
    let u0 = SpectralField::from_modes(lat, &[([1, 0], Complex64::new(0.0, -0.5)), ([-1, 0], Complex64::new(0.0, 0.5))])?;
    let cfg = PicardConfig {
        horizon: 0.05,
        beta: 0.0,
        gamma: 0.0,
        grid: roughstart::time_grid::GridSpec::fine(),
        tol: 1e-12,
        ..PicardConfig::default()
    };
    let res = solve_fix1(&burgers, &u0, &DyadicPartition::new(lat), &cfg)?;
    let etd = etd_reference(&burgers, &u0, 0.05, 1e-5, true)?;
    let err = res.solution.last().sub(etd.last())?.max_abs();
    let a = res.t_effective == 0.05 && err <= 1e-5;
    detail.push(format!("fix1 vs ETD {err:.1e}"));

    // KS: fix1 rejects, fix2 converges
    let ks = EquationSpec::catalogue(EquationKind::KuramotoSivashinsky, 1)?;
    let u0 = sample_ic(&GaussianIcSpec::new(0.6, 42).with_amplitude(0.5), TorusLattice::new(1, 256)?)?;
    let part = DyadicPartition::new(u0.lattice());
    let base = PicardConfig { horizon: 1e-2, alpha: 1.0, ..PicardConfig::default() };
    let f1 = solve_fix1(&ks, &u0, &part, &PicardConfig { beta: 0.45, ..base });
    let f2 = solve_fix2(&ks, &u0, &part, &PicardConfig { beta: 0.39, gamma: 0.6, ..base });
    let b = f1.is_err() && matches!(&f2, Ok(r) if r.converged && r.t_effective == 1e-2);
    detail.push(format!(
        "KS fix1 {}, fix2 {}",
        match &f1 {
            Ok(_) => "converged".to_string(),
            Err(e) => format!("failed ({})", e.to_string().split(':').next().unwrap_or("")),
        },
        match &f2 {
            Ok(r) => format!("converged in {} iterations", r.iterate_norms.len() - 1),
            Err(e) => format!("failed: {e}"),
        }
    ));

    // second order with its fix2 residual
    let ic = GaussianIcSpec::new(0.5, 42).with_log(0.8);
    let u0 = sample_ic(&ic, TorusLattice::new(1, 128)?)?;
    let part = DyadicPartition::new(u0.lattice());
    let cfg = PicardConfig { horizon: 0.0025, nu: 0.8, kappa: 1.3, beta: 0.35, ..PicardConfig::default() };
    let res = solve_second_order(&burgers, &u0, &part, &cfg)?;
    let obj = StochasticObjects::build(&burgers, &u0, &res.iterate.grid)?;
    let ops = ParaOps::new(&burgers, &part, &obj)?;
    let v = &res.iterate;
    let w = Trajectory::combine(&[(1.0, v), (-1.0, &ops.remainder(v)?), (-2.0, &ops.v_lt(v)?)])?;
    let params = WeightedNormParams { alpha: 0.0, kappa: 0.0, beta: cfg.beta, nu: 0.0 };
    let resid = weighted_norm(&w, &params, &part)?.value;
    let scale = cfg.tol * (1.0 + res.iterate_norms.last().copied().unwrap_or(0.0));
    let c = res.converged && resid <= 5.0 * scale;
    detail.push(format!("second order residual {resid:.1e} (5 tol = {:.1e})", 5.0 * scale));
    Ok(outcome(a && b && c, detail.join("; ")))
}

fn c8_blowup() -> Result<Outcome, roughstart::error::Error> {
    let exact = blowup_time(2, 4.0);
    let a = (exact - std::f64::consts::LN_2 / 4.0).abs() <= 1e-12;
    let t = mode_ode_oracle(2, 4.0, 1.0, 1e-10)?.blowup_time();
    let b = t.is_some_and(|t| (t - exact).abs() <= 1e-3);
    let l1 = trichotomy_mc(&BlowupWeightSpec::lemma1(1.6, 0.1, 2000, 1), 500, &[0.05, 0.1])?;
    let l2 = trichotomy_mc(&BlowupWeightSpec::lemma2(EpsilonSequence { c: 1.0, s: 0.0 }, 2000, 1), 500, &[0.01])?;
    let v1 = l1.lemma1.expect("lemma-1 verdict");
    let v2 = l2.lemma2.expect("lemma-2 verdict");
    Ok(outcome(
        a && b && v1.holds && v2.divergent_signature,
        format!(
            "tau = {exact:.6}, oracle {:.6}; lemma 1 fraction {:.3} vs bound {:.3}; lemma 2 signature {}",
            t.unwrap_or(f64::NAN),
            v1.fraction,
            v1.tail_bound,
            v2.divergent_signature
        ),
    ))
}

fn c9_xi() -> Result<Outcome, roughstart::error::Error> {
    let part = DyadicPartition::new(TorusLattice::new(1, 2048)?);
    let s1 = regularity_of_xi(&BlowupWeightSpec::lemma1(1.6, 0.1, 2048, 9), &part, 100)?.raw_slope;
    let s2 = regularity_of_xi(&BlowupWeightSpec::lemma2(EpsilonSequence { c: 1.0, s: 0.0 }, 2048, 9), &part, 100)?.raw_slope;
    Ok(outcome(
        (s1 - 1.5).abs() <= 0.1 && (s2 - 1.5).abs() <= 0.1,
        format!("slopes {s1:.3}, {s2:.3}"),
    ))
}

fn c10_asymptotics() -> Result<Outcome, roughstart::error::Error> {
    let mut ok = true;
    let mut detail = Vec::new();
    for (nu, p, tau) in [(0.0, 1.0, 2.0), (-0.8, 1.0, 2.0), (0.5, 2.0, 2.0)] {
        let r = asymptotic_check(nu, p, tau, (1e-6, 1.0), (1e-6, 1e-2), 200)?;
        ok &= r.sup_ratio.is_finite() && (r.slope - r.target_slope).abs() <= 0.02;
        detail.push(format!("({nu}, {p}, {tau}): {:.4} vs {:.4}", r.slope, r.target_slope));
    }
    Ok(outcome(ok, detail.join("; ")))
}

fn main() -> ExitCode {
    let checks: [(&str, Check, Duration); 10] = [
        ("golden catalogue table", c1_golden_table, Duration::from_secs(1)),
        ("Burgers exponent anchor", c2_burgers_anchor, Duration::from_secs(1)),
        ("paraproduct identity", c3_bony, Duration::from_secs(30)),
        ("Schauder exponents", c4_schauder, Duration::from_secs(10)),
        ("Wick oracle vs Monte Carlo", c5_wick, Duration::from_secs(300)),
        ("singularity boundary", c6_singularity, Duration::from_secs(600)),
        ("fixed-point suites", c7_fixed_points, Duration::from_secs(900)),
        ("blow-up closed form and trichotomy", c8_blowup, Duration::from_secs(300)),
        ("Xi regularity", c9_xi, Duration::from_secs(120)),
        ("asymptotics", c10_asymptotics, Duration::from_secs(5)),
    ];
    let mut unexpected = 0;
    for (i, (name, check, budget)) in checks.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let res = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match res {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_UNATTAINABLE.contains(&n);
        let note = if known { " [known unattainable]" } else { "" };
        println!(
            "criterion {n:>2} {}: {name}: {detail} ({:.2} s, budget {} s){note}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if pass == known {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
