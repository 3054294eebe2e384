//! Conjugate gradient squared and the Crank-Nicolson / BDF4 steppers.

mod cgs;
mod timestep;

pub use cgs::{cgs_solve, CgsConfig, SolveReport};
pub use timestep::{
    bdf4_run, crank_nicolson_run, steady_solve, Scheme, ShiftedOperator, StartupPolicy,
    TimeProblem, TimeStepConfig,
};

pub use crate::structured::LinearOperator;
