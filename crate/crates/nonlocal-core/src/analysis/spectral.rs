//! Row-dominance and symmetric-part diagnostics.
//!
//! The collocation matrix is strictly diagonally dominant by rows with a
//! positive diagonal, which pins its invertibility and a Varah bound on
//! `||A^{-1}||_inf`; at the same time its symmetric part is indefinite, so
//! the matrix itself is nonsymmetric indefinite. These facts are turned into
//! numbers on dense expansions of desk-scale operators.

use super::dense::DenseMatrix;
use super::eig::symmetric_eigen;
use crate::error::CoreError;
use crate::pqc::{CollocationGrid, WeaklySingularKernel};

/// Dense diagnostics refuse anything above this many unknowns.
pub const DENSE_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub dim: usize,
    /// `min_i (|a_ii| - sum_{j != i} |a_ij|)`; positive means strictly
    /// diagonally dominant by rows.
    pub min_row_dominance_gap: f64,
    pub inf_norm: f64,
    /// Varah bound `1 / gap` on `||A^{-1}||_inf` (infinite if gap <= 0).
    pub inv_inf_norm_bound: f64,
    /// `||A||_inf / gap`, an upper bound for the infinity condition number.
    pub cond_bound: f64,
    /// Extremes of the symmetric part `H = (A + A^T)/2`, when computed.
    pub h_min_eig: Option<f64>,
    pub h_max_eig: Option<f64>,
}

fn check_cap(n: usize) -> Result<(), CoreError> {
    if n > DENSE_CAP {
        return Err(CoreError::SizeCapExceeded { size: n, cap: DENSE_CAP });
    }
    Ok(())
}

/// Row-dominance figures for a dense operator expansion.
pub fn dominance_report(a: &DenseMatrix) -> Result<SpectralReport, CoreError> {
    let n = a.rows();
    check_cap(n)?;
    let mut gap = f64::INFINITY;
    let mut inf_norm = 0.0f64;
    for r in 0..n {
        let mut off = 0.0;
        for c in 0..n {
            if c != r {
                off += a.get(r, c).abs();
            }
        }
        let diag = a.get(r, r).abs();
        gap = gap.min(diag - off);
        inf_norm = inf_norm.max(diag + off);
    }
    let inv_bound = if gap > 0.0 { 1.0 / gap } else { f64::INFINITY };
    Ok(SpectralReport {
        dim: n,
        min_row_dominance_gap: gap,
        inf_norm,
        inv_inf_norm_bound: inv_bound,
        cond_bound: inf_norm * inv_bound,
        h_min_eig: None,
        h_max_eig: None,
    })
}

/// The symmetric part `H = (A + A^T) / 2`.
pub fn symmetric_part(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    DenseMatrix::from_fn(n, n, |r, c| 0.5 * (a.get(r, c) + a.get(c, r)))
}

/// Smallest and largest eigenvalue of the symmetric part of `a`.
pub fn symmetric_part_extremes(a: &DenseMatrix) -> Result<(f64, f64), CoreError> {
    check_cap(a.rows())?;
    let h = symmetric_part(a);
    let e = symmetric_eigen(&h);
    Ok((e.values[0], *e.values.last().unwrap()))
}

impl SpectralReport {
    /// Fills the symmetric-part extremes in place.
    pub fn with_symmetric_extremes(mut self, a: &DenseMatrix) -> Result<Self, CoreError> {
        let (lo, hi) = symmetric_part_extremes(a)?;
        self.h_min_eig = Some(lo);
        self.h_max_eig = Some(hi);
        Ok(self)
    }
}

/// Closed-form bound `4(b-a) h^{-1} / (1-gamma)` on the infinity condition
/// number of the 1D operator.
pub fn kappa_bound_1d(grid: &CollocationGrid, kernel: &WeaklySingularKernel) -> f64 {
    4.0 * (grid.b() - grid.a()) / ((1.0 - kernel.gamma()) * grid.h())
}

/// Per-row lower bound `(b-a)^{-gamma} h` on the dominance gap of the 1D
/// operator.
pub fn row_gap_lower_bound_1d(grid: &CollocationGrid, kernel: &WeaklySingularKernel) -> f64 {
    (grid.b() - grid.a()).powf(-kernel.gamma()) * grid.h()
}
