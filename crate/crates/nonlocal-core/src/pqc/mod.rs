//! 1D piecewise quadratic collocation: kernel, grid, closed-form coefficients
//! and the structured operator `A = D - G` with boundary data.

mod coeffs;
mod grid;
mod kernel;
mod operator;

pub use coeffs::{compute_coefficients, CoefficientTable};
pub use grid::CollocationGrid;
pub use kernel::WeaklySingularKernel;
pub use operator::{assemble_operator, boundary_vector, StructuredOperator1D};
