//! Smooth Burgers data: Picard iteration against the ETD2 stepper.

use num_complex::Complex64;
use roughstart::equations::{EquationKind, EquationSpec};
use roughstart::littlewood_paley::DyadicPartition;
use roughstart::solver::{etd_reference, solve_fix1, PicardConfig};
use roughstart::spectral::{SpectralField, TorusLattice};
use roughstart::time_grid::GridSpec;

fn main() -> roughstart::error::Result<()> {
    let spec = EquationSpec::catalogue(EquationKind::Burgers, 1)?;
    let lat = TorusLattice::new(1, 32)?;
    let u0 = SpectralField::from_modes(lat, &[([1, 0], Complex64::new(0.0, -0.5)), ([-1, 0], Complex64::new(0.0, 0.5))])?;
    let cfg = PicardConfig { horizon: 0.05, beta: 0.0, gamma: 0.0, grid: GridSpec::fine(), tol: 1e-12, ..PicardConfig::default() };
    let picard = solve_fix1(&spec, &u0, &DyadicPartition::new(lat), &cfg)?;
    for dt in [1e-2, 5e-3, 2.5e-3] {
        let etd = etd_reference(&spec, &u0, 0.05, dt, true)?;
        println!("dt = {dt:e}: |u_picard - u_etd| = {:.3e}", picard.solution.last().sub(etd.last())?.max_abs());
    }
    Ok(())
}
