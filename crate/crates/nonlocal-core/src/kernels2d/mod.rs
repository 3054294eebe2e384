//! 2D operators for the multiplicative and additive kernels.

mod additive;
mod grid2;
mod multiplicative;
mod quadrature;

pub use additive::{assemble_additive, AdditiveOperator2D, QuadratureSpec};
pub use grid2::Grid2D;
pub use multiplicative::{build_multiplicative, KroneckerOperator2D};
pub use quadrature::{fan_integral_rect, gauss_jacobi_unit, gauss_legendre, tensor_gl_rect};

use crate::analysis::DenseMatrix;
use crate::error::CoreError;
use crate::structured::LinearOperator;

/// Either 2D operator form: the Kronecker pair for the multiplicative kernel
/// or the block-Toeplitz table for the additive kernel.
pub enum Operator2D {
    Kronecker(KroneckerOperator2D),
    BlockToeplitz(AdditiveOperator2D),
}

impl Operator2D {
    pub fn grid(&self) -> &Grid2D {
        match self {
            Operator2D::Kronecker(k) => k.grid(),
            Operator2D::BlockToeplitz(a) => a.grid(),
        }
    }

    pub fn boundary_vector(&self, trace: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
        match self {
            Operator2D::Kronecker(k) => k.boundary_vector(trace),
            Operator2D::BlockToeplitz(a) => a.boundary_vector(trace),
        }
    }

    pub fn dense(&self) -> DenseMatrix {
        match self {
            Operator2D::Kronecker(k) => k.dense(),
            Operator2D::BlockToeplitz(a) => a.dense(),
        }
    }

    pub fn diagonal_bound(&self) -> f64 {
        match self {
            Operator2D::Kronecker(k) => k.diagonal_bound(),
            Operator2D::BlockToeplitz(a) => a.diagonal_bound(),
        }
    }
}

impl LinearOperator for Operator2D {
    fn dim(&self) -> usize {
        self.grid().unknowns()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        match self {
            Operator2D::Kronecker(k) => k.apply(x),
            Operator2D::BlockToeplitz(a) => LinearOperator::apply(a, x),
        }
    }
}
