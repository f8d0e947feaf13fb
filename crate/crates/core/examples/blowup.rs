//! The mode-wise Riccati counterexample: blow-up times and the trichotomy.

use roughstart::blowup::*;
use roughstart::littlewood_paley::DyadicPartition;
use roughstart::spectral::TorusLattice;

fn main() -> roughstart::error::Result<()> {
    let tau = blowup_time(2, 4.0);
    let ode = mode_ode_oracle(2, 4.0, 1.0, 1e-10)?;
    println!("tau_2(xi0 = 4) = {tau:.6}, integrated: {:?}", ode.blowup_time());

    let l1 = trichotomy_mc(&BlowupWeightSpec::lemma1(1.6, 0.1, 2000, 1), 500, &[0.05, 0.1])?;
    let l2 = trichotomy_mc(&BlowupWeightSpec::lemma2(EpsilonSequence { c: 1.0, s: 0.0 }, 2000, 1), 500, &[0.01])?;
    println!("lemma 1: {:?}", l1.lemma1);
    for c in &l2.cutoffs {
        println!("lemma 2, K = {:>4}: mean count {:.3} (expected {:.3}), median inf tau {:.2e}", c.k_max, c.mean_count, c.expected_count, c.median_inf_tau);
    }

    let part = DyadicPartition::new(TorusLattice::new(1, 2048)?);
    let g = regularity_of_xi(&BlowupWeightSpec::lemma1(1.6, 0.1, 2048, 1), &part, 100)?;
    println!("Xi block slope {:.3} (C^-3/2-)", g.raw_slope);
    Ok(())
}
