use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Validation problems (bad input, violated preconditions) and numerical
/// failures (non-contraction, stiffness) are kept apart so the CLI can map
/// them onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("field is not hermitian")]
    NotHermitian,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parameter gate failed: {0}")]
    ParameterGate(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error("time grid error: {0}")]
    Grid(String),
    #[error("no contraction after {attempts} attempt(s); last horizon {last_horizon:e}, last ratios {last_ratios:?}")]
    NonContraction {
        attempts: usize,
        last_horizon: f64,
        last_ratios: Vec<f64>,
    },
    #[error("{0} is not in the working space: its weighted norm peaks at the resolution limit t = {1:e}")]
    OutsideSpace(String, f64),
    #[error("stiffness limit exceeded: |lambda|*dt = {0:.3} > 50")]
    Stiff(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonContraction { .. } | Error::OutsideSpace(..) | Error::Stiff(_) | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
