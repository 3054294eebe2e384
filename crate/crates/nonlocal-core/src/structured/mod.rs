//! FFT-based structured matrix products: Toeplitz via circulant embedding,
//! rectangular embeddings, Kronecker two-sweep applies and the BCCB machinery
//! for block-Toeplitz operators.

mod btcb;
mod complex;
mod fft;
mod kron;
mod op1d;
mod toeplitz;

pub use btcb::{btcb_apply, family_dense, BtcbFamily, InnerBlockSymbols};
pub use complex::Complex;
pub use fft::{fft2, next_pow2, real_fft_padded, FftPlan};
pub use kron::{kron_apply, kron_apply_g};
pub use op1d::FastOperator1D;
pub use toeplitz::{embed_rectangular, toeplitz_matvec, CirculantSpectrum, ToeplitzSymbol};

use crate::error::CoreError;

/// Anything that can act as the system matrix for the iterative solvers.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, CoreError>;
}

impl LinearOperator for FastOperator1D {
    fn dim(&self) -> usize {
        FastOperator1D::dim(self)
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        FastOperator1D::apply(self, x)
    }
}

impl LinearOperator for crate::analysis::DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        if x.len() != self.cols() {
            return Err(CoreError::DimensionMismatch { expected: self.cols(), got: x.len() });
        }
        Ok(self.matvec(x))
    }
}
