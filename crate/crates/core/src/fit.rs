//! Least-squares fits used by the exponent estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = intercept + slope x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter("need >= 2 paired points to fit".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite value in fit data".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Least squares `y = c0 + c1 x1 + c2 x2`; returns `[c0, c1, c2]`.
pub fn two_regressor_fit(x1: &[f64], x2: &[f64], y: &[f64]) -> Result<[f64; 3]> {
    if x1.len() != y.len() || x2.len() != y.len() || y.len() < 3 {
        return Err(Error::InvalidParameter("need >= 3 points to fit".into()));
    }
    let mut m = [[0.0; 4]; 3];
    for i in 0..y.len() {
        let r = [1.0, x1[i], x2[i]];
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] += r[a] * r[b];
            }
            m[a][3] += r[a] * y[i];
        }
    }
    // Gaussian elimination with partial pivoting
    for c in 0..3 {
        let p = (c..3)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        m.swap(c, p);
        if m[c][c].abs() < 1e-300 {
            return Err(Error::Numerical("singular normal equations".into()));
        }
        for r in 0..3 {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..4 {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    Ok([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// `n` points log-spaced on `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 2.0).abs() < 1e-14);
        let x2: Vec<f64> = x.iter().map(|v| v * v).collect();
        let y2: Vec<f64> = x.iter().map(|v| 1.0 + v + 3.0 * v * v).collect();
        let c = two_regressor_fit(&x, &x2, &y2).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-10 && (c[1] - 1.0).abs() < 1e-10 && (c[2] - 3.0).abs() < 1e-10);
    }
}
