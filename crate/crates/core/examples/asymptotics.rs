//! Small-time behaviour of the integrals G_{nu,p,tau}.

use roughstart::criticality::asymptotic_check;

fn main() -> roughstart::error::Result<()> {
    for (nu, p, tau) in [(0.0, 1.0, 2.0), (-0.8, 1.0, 2.0), (0.5, 2.0, 2.0)] {
        let r = asymptotic_check(nu, p, tau, (1e-6, 1.0), (1e-6, 1e-2), 200)?;
        println!(
            "nu {nu:>4}, p {p}, tau {tau}: sup ratio {:.4} at t = {:.1e}, slope {:.4} (target {:.4})",
            r.sup_ratio, r.argsup_t, r.slope, r.target_slope
        );
    }
    Ok(())
}
