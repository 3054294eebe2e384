//! Dense spectral and structural diagnostics for the collocation operators.

mod dense;
mod eig;
mod spectral;

pub use dense::{DenseMatrix, LuFactors};
pub use eig::{real_matrix_eigenvalues, symmetric_eigen, SymmetricEigen};
pub use spectral::{
    dominance_report, kappa_bound_1d, row_gap_lower_bound_1d, symmetric_part,
    symmetric_part_extremes, SpectralReport, DENSE_CAP,
};
