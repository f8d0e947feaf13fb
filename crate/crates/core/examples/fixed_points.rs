//! The direct fixed point and the expansion around the linear solution on
//! rough Kuramoto-Sivashinsky data.

use roughstart::equations::{EquationKind, EquationSpec};
use roughstart::littlewood_paley::DyadicPartition;
use roughstart::random_ic::{sample_ic, GaussianIcSpec};
use roughstart::solver::{solve_fix1, solve_fix2, PicardConfig};
use roughstart::spectral::TorusLattice;

fn main() -> roughstart::error::Result<()> {
    let ks = EquationSpec::catalogue(EquationKind::KuramotoSivashinsky, 1)?;
    let u0 = sample_ic(&GaussianIcSpec::new(0.6, 42).with_amplitude(0.5), TorusLattice::new(1, 256)?)?;
    let part = DyadicPartition::new(u0.lattice());
    let base = PicardConfig { horizon: 1e-2, alpha: 1.0, ..PicardConfig::default() };

    match solve_fix1(&ks, &u0, &part, &PicardConfig { beta: 0.45, ..base }) {
        Ok(r) => println!("fix1 converged after {} iterations", r.iterate_norms.len() - 1),
        Err(e) => println!("fix1: {e}"),
    }
    let r = solve_fix2(&ks, &u0, &part, &PicardConfig { beta: 0.39, gamma: 0.6, ..base })?;
    println!(
        "fix2 converged on [0, {:e}] after {} iterations, ratios {:?}",
        r.t_effective,
        r.iterate_norms.len() - 1,
        r.ratios.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>()
    );
    Ok(())
}
