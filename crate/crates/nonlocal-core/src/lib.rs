//! Solvers for 1D and 2D time-dependent nonlocal diffusion problems with
//! weakly singular kernels `|x - y|^{-gamma}`, `0 < gamma < 1`.
//!
//! The spatial discretization is piecewise quadratic collocation on a uniform
//! half-point lattice. The resulting stiffness matrices are never stored
//! densely: in 1D the operator is a diagonal minus four Toeplitz blocks, in 2D
//! it is either a Kronecker pair (multiplicative kernel) or a two-level
//! block-Toeplitz structure (additive kernel). All products go through FFT
//! circulant embeddings, so a matvec costs `O(n log n)` and an operator costs
//! `O(n)` storage.
//!
//! Module map:
//! - [`pqc`]: 1D collocation coefficients and the structured operator,
//! - [`structured`]: FFT plans, Toeplitz/circulant, Kronecker and
//!   block-Toeplitz-circulant-block matvecs,
//! - [`kernels2d`]: the 2D operators for multiplicative and additive kernels,
//! - [`solvers`]: conjugate gradient squared, Crank-Nicolson and BDF4,
//! - [`analysis`]: dense spectral diagnostics (dominance, condition bounds,
//!   eigenvalue extremes of the symmetric part).
//!
//! A steady 1D solve end to end: the operator annihilates constants, so with
//! zero source and unit boundary data the solution is identically one.
//!
//! ```
//! use nonlocal_core::pqc::{assemble_operator, CollocationGrid, WeaklySingularKernel};
//! use nonlocal_core::solvers::{steady_solve, CgsConfig};
//! use nonlocal_core::structured::FastOperator1D;
//!
//! let grid = CollocationGrid::new(0.0, 1.0, 32)?;
//! let kernel = WeaklySingularKernel::new(0.5)?;
//! let op = FastOperator1D::new(assemble_operator(&grid, &kernel)?)?;
//! let f = vec![0.0; op.dim()];
//! let k = op.boundary_vector(1.0, 1.0);
//! let report = steady_solve(&op, &f, &k, &CgsConfig::with_tol(1e-12))?;
//! assert!(report.solution.iter().all(|u| (u - 1.0).abs() < 1e-9));
//! # Ok::<(), nonlocal_core::CoreError>(())
//! ```

pub mod analysis;
pub mod error;
pub mod kernels2d;
pub mod pqc;
pub mod solvers;
pub mod structured;
pub mod util;

pub use error::CoreError;
pub use pqc::{CoefficientTable, CollocationGrid, StructuredOperator1D, WeaklySingularKernel};
