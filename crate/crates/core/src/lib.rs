//! Spectral toolkit for semilinear parabolic equations on the torus started
//! from rough deterministic or Gaussian random initial data.
//!
//! Fields live on a truncated Fourier lattice ([`spectral`]), are measured
//! with Littlewood-Paley blocks ([`littlewood_paley`]) and evolved by
//! Picard iteration of the mild formulation ([`solver`]).

pub mod blowup;
pub mod cli;
pub mod criticality;
pub mod equations;
pub mod error;
pub mod fit;
pub mod io;
pub mod littlewood_paley;
pub mod random_ic;
pub mod solver;
pub mod spectral;
pub mod stochastic;
pub mod time_grid;

pub use error::{Error, Result};
