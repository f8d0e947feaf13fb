//! Sampling Gaussian initial data and reading off their regularity.

use roughstart::littlewood_paley::DyadicPartition;
use roughstart::random_ic::{block_growth_probe, sample_ic, GaussianIcSpec};
use roughstart::spectral::TorusLattice;

fn main() -> roughstart::error::Result<()> {
    let lat = TorusLattice::new(1, 2048)?;
    let part = DyadicPartition::new(lat);
    for theta in [0.0, 0.5, 1.0] {
        let ic = GaussianIcSpec::new(theta, 42);
        let u0 = sample_ic(&ic, lat)?;
        let probe = block_growth_probe(&ic, &part, 32)?;
        println!(
            "theta {theta}: C^{:.2}-, sample sup {:.3}, block slope {:.3} (reference {:.3})",
            ic.regularity(1),
            u0.max_abs(),
            probe.slope,
            probe.reference_slope
        );
    }
    Ok(())
}
