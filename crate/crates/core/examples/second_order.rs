//! Second-order paracontrolled expansion for Burgers with log-corrected data.

use roughstart::equations::{EquationKind, EquationSpec};
use roughstart::littlewood_paley::DyadicPartition;
use roughstart::random_ic::{sample_ic, GaussianIcSpec};
use roughstart::solver::{solve_second_order, PicardConfig};
use roughstart::spectral::TorusLattice;

fn main() -> roughstart::error::Result<()> {
    let spec = EquationSpec::catalogue(EquationKind::Burgers, 1)?;
    let ic = GaussianIcSpec::new(0.5, 42).with_log(0.8);
    let u0 = sample_ic(&ic, TorusLattice::new(1, 128)?)?;
    let part = DyadicPartition::new(u0.lattice());
    let cfg = PicardConfig { horizon: 0.0025, nu: 0.8, kappa: 1.3, beta: 0.35, ..PicardConfig::default() };
    let r = solve_second_order(&spec, &u0, &part, &cfg)?;
    println!("converged: {}, T = {:e}, residual {:.2e}", r.converged, r.t_effective, r.residual);
    if let Some([double, single, rem]) = r.term_norms {
        println!("term norms: 4V(V(v<eta0)<eta0) {double:.3e}, 2V(R<eta0) {single:.3e}, R {rem:.3e}");
    }
    Ok(())
}
