//! Building fields, dealiased products and derivatives on the torus.

use num_complex::Complex64;
use roughstart::equations::dx;
use roughstart::spectral::{convolve, padded_size, sup_norm, SpectralField, TorusLattice};

fn main() -> roughstart::error::Result<()> {
    let lat = TorusLattice::new(1, 16)?;
    let half = Complex64::new(0.5, 0.0);
    let cos = SpectralField::from_modes(lat, &[([1, 0], half), ([-1, 0], half)])?;

    // cos^2 = 1/2 + cos(2x)/2
    let sq = convolve(&cos, &cos)?;
    println!("padded FFT size for N = 16: {}", padded_size(16));
    println!("(cos^2)_0 = {:.3}, (cos^2)_2 = {:.3}", sq.coeff([0, 0]).re, sq.coeff([2, 0]).re);

    let d = dx(&sq);
    println!("d/dx cos^2 = -sin 2x: mode 2 = {:.3}", d.coeff([2, 0]));
    println!("sup |cos^2| = {:.6}", sup_norm(&sq)?);
    println!("hermitian: {}, mean zero: {}", sq.is_hermitian(), sq.is_mean_zero());
    Ok(())
}
