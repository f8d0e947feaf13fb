//! Catalogue of semilinear equations `du = A u + B(u, u)` and their
//! spectral operators.
//!
//! `A` is diagonal with eigenvalues `lambda_k = -|k|^tau` plus the
//! catalogue's lower-order term. The zero mode is never evolved, so
//! `lambda_0 = 0` for every equation. Lower-order terms do not enter any
//! scaling computation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criticality::{q, qf, scaling_sigma, Q};
use crate::error::{Error, Result};
use crate::spectral::{
    convolve, derivative_multiplier, project_mean_zero, Mode, SpectralField, TorusLattice,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationKind {
    SurfaceGrowth,
    Kpz,
    KuramotoSivashinsky,
    ReactionDiffusion,
    Burgers,
    ConvolutionExample,
    Generic,
}

impl EquationKind {
    pub const CATALOGUE: [EquationKind; 6] = [
        EquationKind::SurfaceGrowth,
        EquationKind::Kpz,
        EquationKind::KuramotoSivashinsky,
        EquationKind::ReactionDiffusion,
        EquationKind::Burgers,
        EquationKind::ConvolutionExample,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EquationKind::SurfaceGrowth => "surface_growth",
            EquationKind::Kpz => "kpz",
            EquationKind::KuramotoSivashinsky => "kuramoto_sivashinsky",
            EquationKind::ReactionDiffusion => "reaction_diffusion",
            EquationKind::Burgers => "burgers",
            EquationKind::ConvolutionExample => "convolution_example",
            EquationKind::Generic => "generic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let k = match s.to_ascii_lowercase().as_str() {
            "surface_growth" | "sg" => EquationKind::SurfaceGrowth,
            "kpz" => EquationKind::Kpz,
            "kuramoto_sivashinsky" | "ks" => EquationKind::KuramotoSivashinsky,
            "reaction_diffusion" | "rd" => EquationKind::ReactionDiffusion,
            "burgers" => EquationKind::Burgers,
            "convolution_example" | "convolution" => EquationKind::ConvolutionExample,
            "generic" => EquationKind::Generic,
            other => return Err(Error::Config(format!("unknown equation kind `{other}`"))),
        };
        Ok(k)
    }
}

/// Lower-order part of the linear operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerOrder {
    None,
    /// `-Delta u`, symbol `+|k|^2`.
    NegLaplacian,
    /// `-u`, symbol `-1`.
    NegIdentity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationSpec {
    pub kind: EquationKind,
    pub tau: Q,
    pub a: Q,
    pub b: Q,
    pub sigma: Q,
    pub d: usize,
    pub degree: u32,
    pub mass_conserving: bool,
    pub lower_order: LowerOrder,
    /// Smallest working regularity that gives the nonlinearity a meaning.
    pub alpha_min: Q,
    /// Whether `|B_kmn| <= |k|^a |m|^b |n|^b` is attained.
    pub sharp: bool,
}

impl EquationSpec {
    pub fn catalogue(kind: EquationKind, d: usize) -> Result<Self> {
        let z = Q::from(0);
        let i = Q::from;
        let (tau, a, b, sigma, mass, lower) = match kind {
            EquationKind::SurfaceGrowth => (i(4), i(2), i(1), z, true, LowerOrder::NegLaplacian),
            EquationKind::Kpz => (i(2), z, i(1), z, true, LowerOrder::None),
            EquationKind::KuramotoSivashinsky => {
                (i(4), z, i(1), i(2), true, LowerOrder::NegLaplacian)
            }
            EquationKind::ReactionDiffusion => (i(2), z, z, i(2), true, LowerOrder::NegIdentity),
            EquationKind::Burgers => (i(2), i(1), z, i(1), true, LowerOrder::None),
            EquationKind::ConvolutionExample => (i(2), i(1), z, i(2), true, LowerOrder::None),
            EquationKind::Generic => {
                return Err(Error::Config(
                    "generic equations need explicit exponents".into(),
                ))
            }
        };
        if matches!(kind, EquationKind::Burgers | EquationKind::ConvolutionExample) && d != 1 {
            return Err(Error::Config(format!("{} is only defined for d = 1", kind.name())));
        }
        let spec = Self {
            kind,
            tau,
            a,
            b,
            sigma,
            d,
            degree: 2,
            mass_conserving: mass,
            lower_order: lower,
            alpha_min: b,
            sharp: kind != EquationKind::ConvolutionExample,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `du = -(-Delta)^{tau/2} u + D^a((D^b u)(D^b u))`, with `D^s = |k|^s`.
    pub fn generic(tau: Q, a: Q, b: Q, d: usize, mass_conserving: bool) -> Result<Self> {
        let spec = Self {
            kind: EquationKind::Generic,
            tau,
            a,
            b,
            sigma: scaling_sigma(tau, a, b, 2)?,
            d,
            degree: 2,
            mass_conserving,
            lower_order: LowerOrder::None,
            alpha_min: b,
            sharp: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d != 1 && self.d != 2 {
            return Err(Error::InvalidParameter(format!("d must be 1 or 2, got {}", self.d)));
        }
        if self.tau <= Q::from(0) {
            return Err(Error::InvalidParameter("tau must be positive".into()));
        }
        if self.a < Q::from(0) || self.b < Q::from(0) {
            return Err(Error::InvalidParameter("a and b must be non-negative".into()));
        }
        if self.a + Q::from(2) * self.b > self.tau {
            return Err(Error::InvalidParameter(format!(
                "need a + 2b <= tau, got a = {}, b = {}, tau = {}",
                self.a, self.b, self.tau
            )));
        }
        if self.degree < 2 {
            return Err(Error::InvalidParameter("degree must be >= 2".into()));
        }
        Ok(())
    }

    pub fn tau_f(&self) -> f64 {
        qf(self.tau)
    }

    pub fn a_f(&self) -> f64 {
        qf(self.a)
    }

    pub fn b_f(&self) -> f64 {
        qf(self.b)
    }

    pub fn sigma_f(&self) -> f64 {
        qf(self.sigma)
    }

    /// `lambda_k`, including lower-order terms; `lambda_0 = 0`.
    pub fn eigenvalue(&self, k: Mode) -> f64 {
        if k == [0, 0] {
            return 0.0;
        }
        let r = TorusLattice::abs(k);
        let main = -r.powf(self.tau_f());
        main + match self.lower_order {
            LowerOrder::None => 0.0,
            LowerOrder::NegLaplacian => r * r,
            LowerOrder::NegIdentity => -1.0,
        }
    }

    pub fn eigenvalues(&self, lattice: TorusLattice) -> Vec<f64> {
        lattice.modes().map(|(_, k)| self.eigenvalue(k)).collect()
    }

    fn check_lattice(&self, f: &SpectralField) -> Result<()> {
        if f.lattice().d() != self.d {
            return Err(Error::LatticeMismatch(format!(
                "equation has d = {}, field has d = {}",
                self.d,
                f.lattice().d()
            )));
        }
        Ok(())
    }

    /// `e^{tA} f`.
    pub fn semigroup_apply(&self, f: &SpectralField, t: f64) -> Result<SpectralField> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
        }
        self.check_lattice(f)?;
        let mut out = f.map_modes(|k| (t * self.eigenvalue(k)).exp());
        if f.is_hermitian() {
            out.symmetrize();
        }
        Ok(out)
    }

    /// The symmetric bilinear form `B(u, v)`.
    pub fn nonlinearity(&self, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
        self.check_lattice(u)?;
        self.check_lattice(v)?;
        if u.lattice() != v.lattice() {
            return Err(Error::LatticeMismatch("operands on different lattices".into()));
        }
        let out = match self.kind {
            EquationKind::SurfaceGrowth => {
                let g = grad_dot(u, v)?;
                derivative_multiplier(&g, 2.0)
            }
            EquationKind::Kpz | EquationKind::KuramotoSivashinsky => {
                project_mean_zero(&grad_dot(u, v)?).scaled(-1.0)
            }
            EquationKind::ReactionDiffusion => project_mean_zero(&convolve(u, v)?),
            EquationKind::Burgers => dx(&convolve(u, v)?),
            EquationKind::ConvolutionExample => {
                let coeffs = u
                    .coeffs()
                    .iter()
                    .zip(v.coeffs())
                    .enumerate()
                    .map(|(i, (a, b))| {
                        let k = u.lattice().mode(i)[0] as f64;
                        a * b * Complex64::new(0.0, k)
                    })
                    .collect();
                SpectralField::from_coeffs(u.lattice(), coeffs)?
            }
            EquationKind::Generic => {
                let (a, b) = (self.a_f(), self.b_f());
                let du = derivative_multiplier(u, b);
                let dv = derivative_multiplier(v, b);
                let p = derivative_multiplier(&convolve(&du, &dv)?, a);
                if self.mass_conserving {
                    project_mean_zero(&p)
                } else {
                    p
                }
            }
        };
        Ok(out)
    }

    /// Closed form of `B(e_m, e_n) = c e_k`; `None` when it vanishes.
    pub fn kernel(&self, m: Mode, n: Mode) -> Option<(Mode, Complex64)> {
        let k = [m[0] + n[0], m[1] + n[1]];
        let dot = (m[0] * n[0] + m[1] * n[1]) as f64;
        let ak = TorusLattice::abs(k);
        let c = match self.kind {
            EquationKind::SurfaceGrowth => Complex64::new(-dot * ak * ak, 0.0),
            EquationKind::Kpz | EquationKind::KuramotoSivashinsky if k != [0, 0] => {
                Complex64::new(dot, 0.0)
            }
            EquationKind::ReactionDiffusion if k != [0, 0] => Complex64::new(1.0, 0.0),
            EquationKind::Burgers => Complex64::new(0.0, k[0] as f64),
            EquationKind::ConvolutionExample if m == n => {
                return Some((m, Complex64::new(0.0, m[0] as f64)));
            }
            EquationKind::Generic if !(self.mass_conserving && k == [0, 0]) => {
                let pw = |v: Mode, s: f64| {
                    if s == 0.0 {
                        1.0
                    } else if v == [0, 0] {
                        0.0
                    } else {
                        TorusLattice::abs(v).powf(s)
                    }
                };
                let b = self.b_f();
                Complex64::new(pw(k, self.a_f()) * pw(m, b) * pw(n, b), 0.0)
            }
            _ => return None,
        };
        if c == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some((k, c))
        }
    }

    /// Coefficient bound `|B_kmn| <= |k|^a |m|^b |n|^b` over all pairs of
    /// basis modes with `|m|_inf, |n|_inf <= n_check`.
    pub fn coefficient_bound_check(&self, n_check: usize) -> Result<CoefficientBound> {
        let lat = TorusLattice::new(self.d, 2 * n_check.max(1))?;
        let one = Complex64::new(1.0, 0.0);
        let (a, b) = (self.a_f(), self.b_f());
        let mut report = CoefficientBound {
            max_ratio: 0.0,
            argmax: None,
            pairs: 0,
            unbounded: false,
        };
        let nc = n_check as i64;
        let range: Vec<Mode> = lat
            .modes()
            .map(|(_, k)| k)
            .filter(|k| k[0].abs() <= nc && k[1].abs() <= nc)
            .collect();
        for &m in &range {
            let em = SpectralField::from_modes(lat, &[(m, one)])?;
            for &n in &range {
                let en = SpectralField::from_modes(lat, &[(n, one)])?;
                let out = self.nonlinearity(&em, &en)?;
                report.pairs += 1;
                for (i, k) in lat.modes() {
                    let c = out.coeffs()[i].norm();
                    if c < 1e-12 {
                        continue;
                    }
                    let denom = TorusLattice::abs(k).powf(a)
                        * TorusLattice::abs(m).powf(b)
                        * TorusLattice::abs(n).powf(b);
                    if denom == 0.0 {
                        report.unbounded = true;
                        continue;
                    }
                    let r = c / denom;
                    if r > report.max_ratio {
                        report.max_ratio = r;
                        report.argmax = Some((k, m, n));
                    }
                }
            }
        }
        Ok(report)
    }
}

/// Worst ratio `|B_kmn| / (|k|^a |m|^b |n|^b)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientBound {
    pub max_ratio: f64,
    pub argmax: Option<(Mode, Mode, Mode)>,
    pub pairs: usize,
    /// A nonzero coefficient met a vanishing denominator.
    pub unbounded: bool,
}

impl CoefficientBound {
    pub fn holds(&self) -> bool {
        !self.unbounded && self.max_ratio <= 1.0 + 1e-12
    }

    pub fn sharp(&self) -> bool {
        self.holds() && self.max_ratio >= 1.0 - 1e-12
    }
}

fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    f.map_modes_complex(|k| Complex64::new(0.0, k[axis] as f64))
}

/// `d/dx` for `d = 1`.
pub fn dx(f: &SpectralField) -> SpectralField {
    partial(f, 0)
}

/// `grad u . grad v`.
fn grad_dot(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let mut acc = convolve(&partial(u, 0), &partial(v, 0))?;
    if u.lattice().d() == 2 {
        acc = acc.add(&convolve(&partial(u, 1), &partial(v, 1))?)?;
    }
    Ok(acc)
}

/// TOML form of an equation; catalogue kinds reject exponent overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationConfig {
    pub kind: String,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub tau: Option<RationalInput>,
    #[serde(default)]
    pub a: Option<RationalInput>,
    #[serde(default)]
    pub b: Option<RationalInput>,
    #[serde(default)]
    pub mass_conserving: Option<bool>,
}

/// A rational written as an integer, a float, or a string `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalInput {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RationalInput {
    pub fn to_q(&self) -> Result<Q> {
        match self {
            RationalInput::Int(i) => Ok(Q::from(*i)),
            RationalInput::Float(x) => Q::approximate_float(*x)
                .ok_or_else(|| Error::Config(format!("cannot represent {x} as a rational"))),
            RationalInput::Text(s) => {
                let s = s.trim();
                if let Some((n, d)) = s.split_once('/') {
                    let n: i64 = n.trim().parse().map_err(|_| bad(s))?;
                    let d: i64 = d.trim().parse().map_err(|_| bad(s))?;
                    if d == 0 {
                        return Err(bad(s));
                    }
                    Ok(q(n, d))
                } else if let Ok(i) = s.parse::<i64>() {
                    Ok(Q::from(i))
                } else {
                    let x: f64 = s.parse().map_err(|_| bad(s))?;
                    RationalInput::Float(x).to_q()
                }
            }
        }
    }
}

fn bad(s: &str) -> Error {
    Error::Config(format!("`{s}` is not a rational number"))
}

impl EquationConfig {
    pub fn to_spec(&self) -> Result<EquationSpec> {
        let kind = EquationKind::parse(&self.kind)?;
        let d = self.d.unwrap_or(1);
        if kind == EquationKind::Generic {
            let need = |x: &Option<RationalInput>, name: &str| {
                x.as_ref()
                    .ok_or_else(|| Error::Config(format!("generic equation needs `{name}`")))?
                    .to_q()
            };
            return EquationSpec::generic(
                need(&self.tau, "tau")?,
                need(&self.a, "a")?,
                need(&self.b, "b")?,
                d,
                self.mass_conserving.unwrap_or(true),
            );
        }
        let spec = EquationSpec::catalogue(kind, d)?;
        for (given, fixed, name) in [
            (&self.tau, spec.tau, "tau"),
            (&self.a, spec.a, "a"),
            (&self.b, spec.b, "b"),
        ] {
            if let Some(g) = given {
                if g.to_q()? != fixed {
                    return Err(Error::Config(format!(
                        "{} fixes {name} = {fixed}; override rejected",
                        kind.name()
                    )));
                }
            }
        }
        if let Some(m) = self.mass_conserving {
            if m != spec.mass_conserving {
                return Err(Error::Config(format!(
                    "{} fixes mass_conserving = {}",
                    kind.name(),
                    spec.mass_conserving
                )));
            }
        }
        Ok(spec)
    }
}
