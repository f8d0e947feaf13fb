//! Mild-formulation solvers: product-integration Duhamel operators, Picard
//! iterations for the three formulations and an ETD reference stepper.

pub mod etd;
pub mod mild;
pub mod picard;

pub use etd::etd_reference;
pub use mild::{apply_v, duhamel, linear_trajectory, nonlinear_trajectory};
pub use picard::{
    remainder_r, solve, solve_classical, solve_fix1, solve_fix2, solve_second_order, Formulation,
    ParaOps, PicardConfig, PicardResult, PicardSummary,
};
