//! Dyadic blocks, Besov norms and the paraproduct decomposition of a product.

use roughstart::littlewood_paley::DyadicPartition;
use roughstart::random_ic::{sample_ic, GaussianIcSpec};
use roughstart::spectral::{convolve, TorusLattice};

fn main() -> roughstart::error::Result<()> {
    let lat = TorusLattice::new(1, 256)?;
    let part = DyadicPartition::new(lat);
    let f = sample_ic(&GaussianIcSpec::new(0.0, 1), lat)?;
    let g = sample_ic(&GaussianIcSpec::new(-1.0, 2), lat)?;

    for (j, b) in part.indices().zip(part.blocks(&f)?) {
        println!("j = {j:>2}  sup |Delta_j f| ~ {:.4}", b.max_abs());
    }
    for alpha in [-1.0, -0.5, 0.0] {
        println!("||f||_C^{alpha} = {:.4}", part.besov_norm(&f, alpha, 0.0)?);
    }

    let lt = part.paraproduct_lt(&f, &g)?;
    let res = part.resonant(&f, &g)?;
    let gt = part.paraproduct_gt(&f, &g)?;
    let prod = convolve(&f, &g)?;
    let err = prod.sub(&lt.add(&res)?.add(&gt)?)?.max_abs();
    println!("f g - (f < g + f o g + f > g): {err:.2e}");
    Ok(())
}
