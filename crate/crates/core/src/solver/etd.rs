//! Second-order exponential time differencing (ETD2RK) for
//! `du/dt = A u + B(u, u)`, used as an independent check on smooth data.

use num_complex::Complex64;

use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::solver::mild::{phi1, phi2};
use crate::spectral::SpectralField;
use crate::time_grid::{TimeGrid, Trajectory};

/// Largest `|lambda| dt` accepted.
pub const MAX_STIFFNESS: f64 = 50.0;

/// `u(T)` and the trajectory on the uniform grid of step `T / ceil(T / dt)`.
/// With `nonlinear = false` the nonlinearity is masked out.
pub fn etd_reference(
    spec: &EquationSpec,
    u0: &SpectralField,
    horizon: f64,
    dt: f64,
    nonlinear: bool,
) -> Result<Trajectory> {
    if !(horizon > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter("need T > 0 and dt > 0".into()));
    }
    let lat = u0.lattice();
    if lat.d() != spec.d {
        return Err(Error::LatticeMismatch("initial datum dimension differs".into()));
    }
    let steps = (horizon / dt).ceil().max(1.0) as usize;
    let h = horizon / steps as f64;
    let lambdas = spec.eigenvalues(lat);
    let stiff = lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs())) * h;
    if stiff > MAX_STIFFNESS {
        return Err(Error::Stiff(stiff));
    }
    let e: Vec<f64> = lambdas.iter().map(|l| (l * h).exp()).collect();
    let p1: Vec<f64> = lambdas.iter().map(|l| h * phi1(l * h)).collect();
    let p2: Vec<f64> = lambdas.iter().map(|l| h * phi2(l * h)).collect();
    let hermitian = u0.is_hermitian();
    let rhs = |u: &SpectralField| -> Result<SpectralField> {
        if nonlinear {
            spec.nonlinearity(u, u)
        } else {
            Ok(SpectralField::zeros(lat))
        }
    };
    let build = |c: Vec<Complex64>| -> Result<SpectralField> {
        let mut f = SpectralField::from_coeffs(lat, c)?;
        if hermitian {
            f.symmetrize();
        }
        Ok(f)
    };
    let mut fields = vec![u0.clone()];
    let mut u = u0.clone();
    for _ in 0..steps {
        let nu = rhs(&u)?;
        let a = build(
            (0..lat.len())
                .map(|i| u.coeffs()[i] * e[i] + nu.coeffs()[i] * p1[i])
                .collect(),
        )?;
        let na = rhs(&a)?;
        u = build(
            (0..lat.len())
                .map(|i| a.coeffs()[i] + (na.coeffs()[i] - nu.coeffs()[i]) * p2[i])
                .collect(),
        )?;
        if !u.max_abs().is_finite() {
            return Err(Error::Numerical("ETD stepper produced non-finite values".into()));
        }
        fields.push(u.clone());
    }
    Trajectory::new(TimeGrid::uniform(horizon, steps)?, fields)
}
