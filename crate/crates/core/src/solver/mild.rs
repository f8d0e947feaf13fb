//! Duhamel integrals `int_0^t e^{(t-s)A} F(s) ds` by product integration:
//! `F` is interpolated linearly between grid nodes and integrated exactly
//! against the exponential kernel, mode by mode.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::time_grid::{TimeGrid, Trajectory};

/// `phi_1(z) = (e^z - 1)/z`.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 0.1 {
        series(z, 1)
    } else {
        z.exp_m1() / z
    }
}

/// `phi_2(z) = (e^z - 1 - z)/z^2`.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 0.1 {
        series(z, 2)
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// `sum_n z^n / (n + k)!`.
fn series(z: f64, k: u32) -> f64 {
    let mut fact = (1..=k).map(|i| i as f64).product::<f64>();
    let mut sum = 0.0;
    let mut pow = 1.0;
    for n in 0..18 {
        sum += pow / fact;
        pow *= z;
        fact *= (n + k + 1) as f64;
    }
    sum
}

/// Weights `(w_0, w_1)` with `int_0^h e^{lambda (h-s)} f(s) ds ~ w_0 f(0) + w_1 f(h)`.
pub fn linear_weights(lambda: f64, h: f64) -> (f64, f64) {
    let z = lambda * h;
    let p1 = phi1(z);
    let p2 = phi2(z);
    (h * (p1 - p2), h * p2)
}

/// `e^{tA} u_0` at every node.
pub fn linear_trajectory(
    spec: &EquationSpec,
    u0: &SpectralField,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let fields = grid
        .nodes()
        .par_iter()
        .map(|&t| spec.semigroup_apply(u0, t))
        .collect::<Result<_>>()?;
    Trajectory::new(grid.clone(), fields)
}

/// `t -> int_0^t e^{(t-s)A} F(s) ds` on the nodes of `forcing`'s grid.
pub fn duhamel(spec: &EquationSpec, forcing: &Trajectory) -> Result<Trajectory> {
    let lat = forcing.fields[0].lattice();
    if lat.d() != spec.d {
        return Err(Error::LatticeMismatch("forcing dimension differs from equation".into()));
    }
    let nodes = forcing.times();
    let lambdas = spec.eigenvalues(lat);
    let columns: Vec<Vec<Complex64>> = (0..lat.len())
        .into_par_iter()
        .map(|i| {
            let lam = lambdas[i];
            let mut out = Vec::with_capacity(nodes.len());
            let mut acc = Complex64::new(0.0, 0.0);
            out.push(acc);
            for n in 1..nodes.len() {
                let h = nodes[n] - nodes[n - 1];
                let (w0, w1) = linear_weights(lam, h);
                let f0 = forcing.fields[n - 1].coeffs()[i];
                let f1 = forcing.fields[n].coeffs()[i];
                acc = acc * (lam * h).exp() + f0 * w0 + f1 * w1;
                out.push(acc);
            }
            out
        })
        .collect();
    let hermitian = forcing.fields.iter().all(|f| f.is_hermitian());
    let fields = (0..nodes.len())
        .into_par_iter()
        .map(|n| {
            let coeffs = columns.iter().map(|c| c[n]).collect();
            let mut f = SpectralField::from_coeffs(lat, coeffs)?;
            if hermitian {
                f.symmetrize();
            }
            Ok(f)
        })
        .collect::<Result<_>>()?;
    Trajectory::new(forcing.grid.clone(), fields)
}

/// `B(u_1(t), u_2(t))` at every node.
pub fn nonlinear_trajectory(
    spec: &EquationSpec,
    u1: &Trajectory,
    u2: &Trajectory,
) -> Result<Trajectory> {
    if u1.grid != u2.grid {
        return Err(Error::Grid("operands live on different grids".into()));
    }
    let fields = u1
        .fields
        .par_iter()
        .zip(u2.fields.par_iter())
        .map(|(a, b)| spec.nonlinearity(a, b))
        .collect::<Result<_>>()?;
    Trajectory::new(u1.grid.clone(), fields)
}

/// `V(u_1, u_2)(t) = int_0^t e^{(t-s)A} B(u_1(s), u_2(s)) ds`.
pub fn apply_v(spec: &EquationSpec, u1: &Trajectory, u2: &Trajectory) -> Result<Trajectory> {
    duhamel(spec, &nonlinear_trajectory(spec, u1, u2)?)
}
