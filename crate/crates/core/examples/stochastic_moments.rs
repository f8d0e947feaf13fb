//! Exact chaos moments against Monte Carlo, and the singularity of eta1 at t = 0.

use roughstart::equations::{EquationKind, EquationSpec};
use roughstart::littlewood_paley::DyadicPartition;
use roughstart::random_ic::GaussianIcSpec;
use roughstart::spectral::TorusLattice;
use roughstart::stochastic::*;

fn main() -> roughstart::error::Result<()> {
    let spec = EquationSpec::catalogue(EquationKind::Burgers, 1)?;
    let part = DyadicPartition::new(TorusLattice::new(1, 256)?);
    let ic = GaussianIcSpec::new(0.5, 7);

    for t in [1e-3, 1e-2] {
        let exact = exact_second_moment(&spec, &ic, &part, Chaos::Eta1, 4, t)?;
        let mc = mc_second_moment(&spec, &ic, &part, 4, t, 1000)?;
        println!("t = {t:e}: E|Delta_4 eta1|^2 = {exact:.5e}, MC {:.5e} +- {:.1e}", mc.mean, mc.std_err);
    }

    let window = default_window(&spec, part.lattice());
    for (name, chaos, est) in [
        ("eta1, random", Chaos::Eta1, Estimator::ExactMoments),
        ("eta1, deterministic", Chaos::Eta1, Estimator::Deterministic),
        ("eta2, random", Chaos::Eta2, Estimator::ExactMoments),
    ] {
        let fit = singularity_fit(&spec, &ic, &part, chaos, 0.0, est, window, 12)?;
        println!("{name:<20} ~ t^-{:.3} (r2 {:.4})", fit.exponent, fit.r2);
    }
    Ok(())
}
