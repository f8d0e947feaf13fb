//! Truncated Fourier fields on the torus `T^d`, `d in {1, 2}`.
//!
//! A field is stored as the full array of coefficients `u_k`, `|k|_inf <= N`,
//! with `u(x) = sum_k u_k exp(i k.x)`. Products follow `e_m e_n = e_{m+n}`
//! and are truncated back to the lattice without aliasing.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wave vector; the second component is zero when `d = 1`.
pub type Mode = [i64; 2];

/// The truncated lattice `{k in Z^d : |k|_inf <= N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusLattice {
    d: usize,
    n: usize,
}

impl TorusLattice {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::Lattice(format!("dimension must be 1 or 2, got {d}")));
        }
        if n < 2 {
            return Err(Error::Lattice(format!("truncation N must be >= 2, got {n}")));
        }
        Ok(Self { d, n })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    /// Number of modes, `(2N+1)^d`.
    pub fn len(&self) -> usize {
        self.side().pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: Mode) -> bool {
        let n = self.n as i64;
        let inside = |c: i64| c.abs() <= n;
        match self.d {
            1 => inside(k[0]) && k[1] == 0,
            _ => inside(k[0]) && inside(k[1]),
        }
    }

    pub fn index(&self, k: Mode) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let n = self.n as i64;
        let s = self.side();
        Some(match self.d {
            1 => (k[0] + n) as usize,
            _ => (k[0] + n) as usize * s + (k[1] + n) as usize,
        })
    }

    pub fn mode(&self, idx: usize) -> Mode {
        let n = self.n as i64;
        match self.d {
            1 => [idx as i64 - n, 0],
            _ => {
                let s = self.side();
                [(idx / s) as i64 - n, (idx % s) as i64 - n]
            }
        }
    }

    /// Index of `-k` for the mode stored at `idx`.
    pub fn mirror(&self, idx: usize) -> usize {
        self.len() - 1 - idx
    }

    pub fn zero_index(&self) -> usize {
        self.len() / 2
    }

    pub fn modes(&self) -> impl Iterator<Item = (usize, Mode)> + '_ {
        (0..self.len()).map(move |i| (i, self.mode(i)))
    }

    /// Euclidean length of `k`.
    pub fn abs(k: Mode) -> f64 {
        ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt()
    }

    /// True for the lexicographically positive half of `Z^d \ {0}`.
    pub fn is_positive_half(k: Mode) -> bool {
        k[0] > 0 || (k[0] == 0 && k[1] > 0)
    }
}

/// A truncated Fourier series with bookkeeping flags.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    lattice: TorusLattice,
    coeffs: Vec<Complex64>,
    hermitian: bool,
    mean_zero: bool,
}

impl SpectralField {
    pub fn zeros(lattice: TorusLattice) -> Self {
        Self {
            lattice,
            coeffs: vec![Complex64::new(0.0, 0.0); lattice.len()],
            hermitian: true,
            mean_zero: true,
        }
    }

    /// Builds a field from raw coefficients, detecting the flags.
    pub fn from_coeffs(lattice: TorusLattice, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::LatticeMismatch(format!(
                "expected {} coefficients, got {}",
                lattice.len(),
                coeffs.len()
            )));
        }
        let mut f = Self {
            lattice,
            coeffs,
            hermitian: false,
            mean_zero: false,
        };
        f.refresh_flags();
        Ok(f)
    }

    pub fn from_fn(lattice: TorusLattice, mut g: impl FnMut(Mode) -> Complex64) -> Self {
        let coeffs = lattice.modes().map(|(_, k)| g(k)).collect();
        let mut f = Self {
            lattice,
            coeffs,
            hermitian: false,
            mean_zero: false,
        };
        f.refresh_flags();
        f
    }

    /// `sum_k c_k e_k` for a list of `(k, c_k)` pairs.
    pub fn from_modes(lattice: TorusLattice, entries: &[(Mode, Complex64)]) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); lattice.len()];
        for &(k, c) in entries {
            let i = lattice
                .index(k)
                .ok_or_else(|| Error::Lattice(format!("mode {k:?} outside lattice")))?;
            coeffs[i] += c;
        }
        Self::from_coeffs(lattice, coeffs)
    }

    pub fn lattice(&self) -> TorusLattice {
        self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        self.hermitian = false;
        self.mean_zero = false;
        &mut self.coeffs
    }

    pub fn coeff(&self, k: Mode) -> Complex64 {
        self.lattice
            .index(k)
            .map(|i| self.coeffs[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    /// Recomputes both flags from the coefficients (relative tolerance 1e-12).
    pub fn refresh_flags(&mut self) {
        let scale = self.max_abs();
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        let len = self.coeffs.len();
        self.hermitian = (0..len).all(|i| {
            let j = len - 1 - i;
            (self.coeffs[i] - self.coeffs[j].conj()).norm() <= tol
        });
        self.mean_zero = self.coeffs[self.lattice.zero_index()].norm() == 0.0;
    }

    /// Replaces `c_k` by `(c_k + conj c_{-k}) / 2`.
    pub fn symmetrize(&mut self) {
        let len = self.coeffs.len();
        for i in 0..len / 2 + 1 {
            let j = len - 1 - i;
            let avg = (self.coeffs[i] + self.coeffs[j].conj()) * 0.5;
            self.coeffs[i] = avg;
            self.coeffs[j] = avg.conj();
        }
        self.hermitian = true;
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `(sum_k |u_k|^2)^{1/2}`.
    pub fn l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch(format!(
                "{:?} vs {:?}",
                self.lattice, other.lattice
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        self.check_same(other)?;
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
        self.hermitian &= other.hermitian;
        self.mean_zero &= other.mean_zero;
        Ok(())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            lattice: self.lattice,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
            hermitian: self.hermitian,
            mean_zero: self.mean_zero,
        }
    }

    fn zip(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            lattice: self.lattice,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| op(*a, *b))
                .collect(),
            hermitian: self.hermitian && other.hermitian,
            mean_zero: self.mean_zero && other.mean_zero,
        }
    }

    /// Multiplies every coefficient by a real function of the mode.
    pub fn map_modes(&self, m: impl Fn(Mode) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * m(self.lattice.mode(i)))
            .collect();
        let mut out = Self {
            lattice: self.lattice,
            coeffs,
            hermitian: false,
            mean_zero: false,
        };
        out.mean_zero = self.mean_zero || out.coeffs[self.lattice.zero_index()].norm() == 0.0;
        out.hermitian = self.hermitian;
        out
    }

    /// Multiplies every coefficient by a complex function of the mode.
    pub fn map_modes_complex(&self, m: impl Fn(Mode) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * m(self.lattice.mode(i)))
            .collect();
        Self::from_coeffs(self.lattice, coeffs).expect("same lattice")
    }

    /// Copies the field onto another lattice, dropping modes that do not fit.
    pub fn resized(&self, target: TorusLattice) -> Result<Self> {
        if target.d() != self.lattice.d() {
            return Err(Error::LatticeMismatch("dimension differs".into()));
        }
        let mut out = Self::zeros(target);
        for (i, k) in self.lattice.modes() {
            if let Some(j) = target.index(k) {
                out.coeffs[j] = self.coeffs[i];
            }
        }
        out.hermitian = self.hermitian;
        out.mean_zero = self.mean_zero;
        Ok(out)
    }

    /// Spatial dilation `f(x) -> f(m x)` for an integer factor `m`, placed on `target`.
    pub fn dilate(&self, factor: i64, target: TorusLattice) -> Result<Self> {
        if factor < 1 {
            return Err(Error::InvalidParameter("dilation factor must be >= 1".into()));
        }
        if target.d() != self.lattice.d() || target.n() < factor as usize * self.lattice.n() {
            return Err(Error::LatticeMismatch(
                "target lattice too small for the dilated field".into(),
            ));
        }
        let mut out = Self::zeros(target);
        for (i, k) in self.lattice.modes() {
            let j = target.index([factor * k[0], factor * k[1]]).expect("fits");
            out.coeffs[j] = self.coeffs[i];
        }
        out.hermitian = self.hermitian;
        out.mean_zero = self.mean_zero;
        Ok(out)
    }

    /// Point evaluation `u(x)`.
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        self.lattice
            .modes()
            .filter(|(i, _)| self.coeffs[*i] != Complex64::new(0.0, 0.0))
            .map(|(i, k)| {
                let ph = k[0] as f64 * x[0] + k[1] as f64 * x[1];
                self.coeffs[i] * Complex64::from_polar(1.0, ph)
            })
            .sum()
    }

    /// Values on the uniform grid with `m` points per axis (`m >= 2N+1`).
    pub fn to_physical(&self, m: usize) -> Vec<Complex64> {
        assert!(m > 2 * self.lattice.n(), "grid too coarse");
        let d = self.lattice.d();
        let mut buf = vec![Complex64::new(0.0, 0.0); m.pow(d as u32)];
        let wrap = |c: i64| c.rem_euclid(m as i64) as usize;
        for (i, k) in self.lattice.modes() {
            let pos = match d {
                1 => wrap(k[0]),
                _ => wrap(k[0]) * m + wrap(k[1]),
            };
            buf[pos] = self.coeffs[i];
        }
        fft_nd(&mut buf, m, d, FftDirection::Inverse);
        buf
    }

    /// Inverse of [`to_physical`](Self::to_physical) restricted to `lattice`.
    pub fn from_physical(lattice: TorusLattice, mut values: Vec<Complex64>, m: usize) -> Self {
        let d = lattice.d();
        assert_eq!(values.len(), m.pow(d as u32));
        fft_nd(&mut values, m, d, FftDirection::Forward);
        let norm = 1.0 / values.len() as f64;
        let wrap = |c: i64| c.rem_euclid(m as i64) as usize;
        let coeffs = lattice
            .modes()
            .map(|(_, k)| {
                let pos = match d {
                    1 => wrap(k[0]),
                    _ => wrap(k[0]) * m + wrap(k[1]),
                };
                values[pos] * norm
            })
            .collect();
        Self {
            lattice,
            coeffs,
            hermitian: false,
            mean_zero: false,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let coeffs = self
            .lattice
            .modes()
            .filter(|(i, _)| self.coeffs[*i] != Complex64::new(0.0, 0.0))
            .map(|(i, k)| {
                let kv = k[..self.lattice.d()].to_vec();
                (kv, self.coeffs[i].re, self.coeffs[i].im)
            })
            .collect();
        let doc = FieldDoc {
            d: self.lattice.d(),
            n: self.lattice.n(),
            coeffs,
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: FieldDoc = serde_json::from_str(s)?;
        let lattice = TorusLattice::new(doc.d, doc.n)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); lattice.len()];
        let mut seen = vec![false; lattice.len()];
        for (k, re, im) in doc.coeffs {
            if k.len() != doc.d {
                return Err(Error::Format(format!("mode {k:?} has wrong dimension")));
            }
            let mode = [k[0], if doc.d == 2 { k[1] } else { 0 }];
            let i = lattice
                .index(mode)
                .ok_or_else(|| Error::Format(format!("mode {k:?} outside lattice")))?;
            if seen[i] {
                return Err(Error::Format(format!("duplicate mode {k:?}")));
            }
            seen[i] = true;
            coeffs[i] = Complex64::new(re, im);
        }
        Self::from_coeffs(lattice, coeffs)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldDoc {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    coeffs: Vec<(Vec<i64>, f64, f64)>,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(m: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(m, dir))
}

/// In-place unnormalised DFT over a `d`-dimensional cube of side `m`.
fn fft_nd(buf: &mut [Complex64], m: usize, d: usize, dir: FftDirection) {
    let f = plan(m, dir);
    let mut scratch = vec![Complex64::new(0.0, 0.0); f.get_inplace_scratch_len()];
    f.process_with_scratch(buf, &mut scratch);
    if d == 2 {
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for c in 0..m {
            for r in 0..m {
                col[r] = buf[r * m + c];
            }
            f.process_with_scratch(&mut col, &mut scratch);
            for r in 0..m {
                buf[r * m + c] = col[r];
            }
        }
    }
}

/// Grid size used for alias-free products of two fields on a lattice of size `n`.
pub fn padded_size(n: usize) -> usize {
    (3 * n + 1).next_power_of_two()
}

/// Truncated product `(f g)_k = sum_{m+n=k} f_m g_n`, via zero-padded FFT.
pub fn convolve(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_same(g)?;
    let m = padded_size(f.lattice.n());
    let a = f.to_physical(m);
    let b = g.to_physical(m);
    let prod = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let mut out = SpectralField::from_physical(f.lattice, prod, m);
    finish_product(&mut out, f.hermitian && g.hermitian);
    Ok(out)
}

/// Truncated product evaluated by the direct double sum; `O(N^{2d})`.
pub fn convolve_direct(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_same(g)?;
    let lat = f.lattice;
    let mut out = SpectralField::zeros(lat);
    for (i, m) in lat.modes() {
        if f.coeffs[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, n) in lat.modes() {
            if let Some(k) = lat.index([m[0] + n[0], m[1] + n[1]]) {
                out.coeffs[k] += f.coeffs[i] * g.coeffs[j];
            }
        }
    }
    out.refresh_flags();
    Ok(out)
}

pub(crate) fn finish_product(out: &mut SpectralField, hermitian: bool) {
    if hermitian {
        out.symmetrize();
    } else {
        out.refresh_flags();
    }
    out.mean_zero = out.coeffs[out.lattice.zero_index()].norm() == 0.0;
}

/// Multiplies by `|k|^s` (Euclidean); the zero mode is sent to 0 unless `s = 0`.
pub fn derivative_multiplier(f: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return f.clone();
    }
    let mut out = f.map_modes(|k| {
        if k == [0, 0] {
            0.0
        } else {
            TorusLattice::abs(k).powf(s)
        }
    });
    out.mean_zero = true;
    out
}

pub fn project_mean_zero(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    let z = f.lattice.zero_index();
    out.coeffs[z] = Complex64::new(0.0, 0.0);
    out.mean_zero = true;
    out
}

/// Default oversampling relative to the Nyquist count `2N+1`.
pub const SUP_OVERSAMPLING: usize = 4;

/// `sup_x |u(x)|` for a real (hermitian) field.
///
/// The maximum over a grid oversampled `4x` is polished by Newton steps
/// around the best grid points, so the result is a lower bound that is
/// sharp to round-off for well-separated maxima.
pub fn sup_norm(f: &SpectralField) -> Result<f64> {
    sup_norm_oversampled(f, SUP_OVERSAMPLING)
}

pub fn sup_norm_oversampled(f: &SpectralField, factor: usize) -> Result<f64> {
    if !f.hermitian {
        return Err(Error::NotHermitian);
    }
    if factor < 1 {
        return Err(Error::InvalidParameter("oversampling factor must be >= 1".into()));
    }
    let terms: Vec<(Mode, Complex64)> = f
        .lattice
        .modes()
        .filter(|(i, _)| f.coeffs[*i] != Complex64::new(0.0, 0.0))
        .map(|(i, k)| (k, f.coeffs[i]))
        .collect();
    if terms.is_empty() {
        return Ok(0.0);
    }
    if terms.len() == 1 {
        return Ok(terms[0].1.norm());
    }
    let m = (factor * f.lattice.side()).next_power_of_two();
    let vals: Vec<f64> = f.to_physical(m).iter().map(|c| c.re).collect();
    let h = 2.0 * std::f64::consts::PI / m as f64;
    let d = f.lattice.d();
    let candidates = local_extrema(&vals, m, d, 3);
    let mut best = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for c in candidates {
        let x0 = match d {
            1 => [c as f64 * h, 0.0],
            _ => [(c / m) as f64 * h, (c % m) as f64 * h],
        };
        best = best.max(newton_polish(&terms, x0, h, d));
    }
    Ok(best)
}

fn local_extrema(vals: &[f64], m: usize, d: usize, count: usize) -> Vec<usize> {
    let at = |r: usize, c: usize| vals[(r % m) * m + (c % m)].abs();
    let mut peaks: Vec<(f64, usize)> = Vec::new();
    for i in 0..vals.len() {
        let v = vals[i].abs();
        let is_peak = match d {
            1 => v >= vals[(i + m - 1) % m].abs() && v >= vals[(i + 1) % m].abs(),
            _ => {
                let (r, c) = (i / m, i % m);
                [(m - 1, 0), (1, 0), (0, m - 1), (0, 1)]
                    .iter()
                    .all(|&(dr, dc)| v >= at(r + dr, c + dc))
            }
        };
        if is_peak {
            peaks.push((v, i));
        }
    }
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0));
    peaks.truncate(count);
    peaks.into_iter().map(|p| p.1).collect()
}

/// Newton iteration for a stationary point of the real trigonometric polynomial.
fn newton_polish(terms: &[(Mode, Complex64)], x0: [f64; 2], h: f64, d: usize) -> f64 {
    let eval = |x: [f64; 2]| {
        let mut v = 0.0;
        let mut g = [0.0; 2];
        let mut hess = [[0.0; 2]; 2];
        for &(k, c) in terms {
            let kf = [k[0] as f64, k[1] as f64];
            let z = c * Complex64::from_polar(1.0, kf[0] * x[0] + kf[1] * x[1]);
            v += z.re;
            // d/dx e^{ikx} = i k e^{ikx}
            for a in 0..2 {
                g[a] -= kf[a] * z.im;
                for b in 0..2 {
                    hess[a][b] -= kf[a] * kf[b] * z.re;
                }
            }
        }
        (v, g, hess)
    };
    let mut x = x0;
    let (v0, _, _) = eval(x);
    let mut best = v0.abs();
    for _ in 0..12 {
        let (_, g, hs) = eval(x);
        let step = if d == 1 {
            if hs[0][0] == 0.0 {
                break;
            }
            [g[0] / hs[0][0], 0.0]
        } else {
            let det = hs[0][0] * hs[1][1] - hs[0][1] * hs[1][0];
            if det == 0.0 {
                break;
            }
            [
                (hs[1][1] * g[0] - hs[0][1] * g[1]) / det,
                (hs[0][0] * g[1] - hs[1][0] * g[0]) / det,
            ]
        };
        let nx = [x[0] - step[0], x[1] - step[1]];
        if (nx[0] - x0[0]).abs() > 1.5 * h || (nx[1] - x0[1]).abs() > 1.5 * h {
            break;
        }
        x = nx;
        let (v, _, _) = eval(x);
        best = best.max(v.abs());
        if step[0].abs() + step[1].abs() < 1e-15 {
            break;
        }
    }
    best
}
