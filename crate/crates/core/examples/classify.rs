//! Scaling, criticality and the exponents of the stochastic objects.

use roughstart::criticality::{chi_exponents, classify, q};
use roughstart::equations::{EquationKind, EquationSpec};

fn main() -> roughstart::error::Result<()> {
    for kind in EquationKind::CATALOGUE {
        let spec = EquationSpec::catalogue(kind, 1)?;
        let r = classify(&spec, None)?;
        println!(
            "{:<22} tau {} sigma {} alpha {} delta {} -> {:?}",
            r.equation, r.tau, r.sigma, r.alpha_min, r.delta, r.regime
        );
    }
    let burgers = EquationSpec::catalogue(EquationKind::Burgers, 1)?;
    let chi = chi_exponents(&burgers, q(1, 2));
    println!("Burgers, theta = 1/2: beta0(0) = {}", chi.beta0(q(0, 1)));
    Ok(())
}
