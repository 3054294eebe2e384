//! Conjugate gradient squared for the nonsymmetric collocation systems.
//!
//! Transpose-free squared-BiCG recurrences with the shadow residual fixed at
//! the initial residual:
//!
//! ```text
//! v = A p
//! alpha = (r, r*) / (v, r*)
//! q = z - alpha v
//! x += alpha (z + q)
//! r -= alpha A (z + q)
//! beta = (r+, r*) / (r, r*)
//! z = r+ + beta q
//! p = z + beta (q + beta p)
//! ```
//!
//! The residual is carried in update form and re-synced against the true
//! residual `b - A x` every ten iterations so drift cannot fake convergence.
//! All reductions are plain left-to-right sums, so a fixed configuration
//! reproduces bitwise.

use crate::error::CoreError;
use crate::structured::LinearOperator;
use crate::util::{dot, norm2};
use std::time::Instant;

#[derive(Debug, Clone, Copy)]
pub struct CgsConfig {
    /// Relative residual threshold, `||b - A x|| / ||b|| <= tol`.
    pub tol: f64,
    pub maxit: usize,
    pub record_history: bool,
}

impl Default for CgsConfig {
    fn default() -> Self {
        Self { tol: 1e-9, maxit: 1000, record_history: false }
    }
}

impl CgsConfig {
    pub fn new(tol: f64, maxit: usize) -> Self {
        assert!(tol > 0.0 && maxit >= 1);
        Self { tol, maxit, record_history: false }
    }

    pub fn with_tol(tol: f64) -> Self {
        Self::new(tol, 1000)
    }
}

/// Outcome of one linear solve or one time-stepping run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    /// CGS iterations spent per linear solve (one entry per time step for the
    /// steppers, a single entry for a steady solve).
    pub iterations_per_step: Vec<usize>,
    /// Final relative residual per linear solve; history of the residual
    /// decay when `record_history` is set.
    pub residuals: Vec<f64>,
    pub wall_seconds: f64,
    /// Set when some solve stopped at `maxit` without meeting `tol`.
    pub maxit_hit: bool,
}

impl SolveReport {
    pub fn max_iterations(&self) -> usize {
        self.iterations_per_step.iter().copied().max().unwrap_or(0)
    }
}

/// How often the update-form residual is replaced by `b - A x`.
const TRUE_RESIDUAL_EVERY: usize = 10;

pub fn cgs_solve(
    op: &dyn LinearOperator,
    rhs: &[f64],
    x0: &[f64],
    cfg: &CgsConfig,
) -> Result<SolveReport, CoreError> {
    let n = op.dim();
    if rhs.len() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: rhs.len() });
    }
    if x0.len() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: x0.len() });
    }
    let start = Instant::now();
    let b_norm = norm2(rhs);
    if b_norm == 0.0 {
        return Ok(SolveReport {
            solution: vec![0.0; n],
            iterations_per_step: vec![0],
            residuals: vec![0.0],
            wall_seconds: start.elapsed().as_secs_f64(),
            maxit_hit: false,
        });
    }

    let mut x = x0.to_vec();
    let ax0 = op.apply(&x)?;
    let mut r: Vec<f64> = rhs.iter().zip(&ax0).map(|(b, a)| b - a).collect();
    let r_star = r.clone();
    let mut z = r.clone();
    let mut p = r.clone();
    let mut q = vec![0.0; n];
    let mut rho = dot(&r, &r_star);
    let r0_sq = rho.max(b_norm * b_norm * f64::EPSILON * f64::EPSILON);
    let mut history = Vec::new();
    let mut relres = norm2(&r) / b_norm;
    if cfg.record_history {
        history.push(relres);
    }
    if relres <= cfg.tol {
        return Ok(SolveReport {
            solution: x,
            iterations_per_step: vec![0],
            residuals: if cfg.record_history { history } else { vec![relres] },
            wall_seconds: start.elapsed().as_secs_f64(),
            maxit_hit: false,
        });
    }

    let breakdown_floor = f64::EPSILON * f64::EPSILON * r0_sq;
    let mut iters = 0;
    let mut maxit_hit = false;
    loop {
        if iters >= cfg.maxit {
            maxit_hit = true;
            break;
        }
        iters += 1;

        let v = op.apply(&p)?;
        let sigma = dot(&v, &r_star);
        if sigma.abs() <= breakdown_floor {
            return Err(CoreError::CgsBreakdown { iteration: iters });
        }
        let alpha = rho / sigma;
        for i in 0..n {
            q[i] = z[i] - alpha * v[i];
        }
        let zq: Vec<f64> = z.iter().zip(&q).map(|(a, b)| a + b).collect();
        for i in 0..n {
            x[i] += alpha * zq[i];
        }
        if iters % TRUE_RESIDUAL_EVERY == 0 {
            let ax = op.apply(&x)?;
            for i in 0..n {
                r[i] = rhs[i] - ax[i];
            }
        } else {
            let azq = op.apply(&zq)?;
            for i in 0..n {
                r[i] -= alpha * azq[i];
            }
        }
        relres = norm2(&r) / b_norm;
        if cfg.record_history {
            history.push(relres);
        }
        if relres <= cfg.tol {
            break;
        }
        let rho_next = dot(&r, &r_star);
        if rho.abs() <= breakdown_floor {
            return Err(CoreError::CgsBreakdown { iteration: iters });
        }
        let beta = rho_next / rho;
        rho = rho_next;
        for i in 0..n {
            z[i] = r[i] + beta * q[i];
        }
        for i in 0..n {
            p[i] = z[i] + beta * (q[i] + beta * p[i]);
        }
    }

    // Always report the true final residual.
    let ax = op.apply(&x)?;
    let true_res: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    relres = norm2(&true_res) / b_norm;
    if cfg.record_history {
        history.push(relres);
    } else {
        history = vec![relres];
    }
    Ok(SolveReport {
        solution: x,
        iterations_per_step: vec![iters],
        residuals: history,
        wall_seconds: start.elapsed().as_secs_f64(),
        maxit_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::DenseMatrix;
    use crate::util::SplitMix64;

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = DenseMatrix::identity(12);
        let b: Vec<f64> = (0..12).map(|i| i as f64 - 4.0).collect();
        let rep = cgs_solve(&a, &b, &vec![0.0; 12], &CgsConfig::default()).unwrap();
        assert_eq!(rep.max_iterations(), 1);
        for (x, want) in rep.solution.iter().zip(&b) {
            assert!((x - want).abs() < 1e-12);
        }
        assert!(!rep.maxit_hit);
    }

    #[test]
    fn zero_rhs_returns_zero_without_iterating() {
        let a = DenseMatrix::identity(5);
        let rep = cgs_solve(&a, &[0.0; 5], &[1.0; 5], &CgsConfig::default()).unwrap();
        assert_eq!(rep.max_iterations(), 0);
        assert!(rep.solution.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn diagonally_dominant_random_system_solves_to_tolerance() {
        let n = 60;
        let mut rng = SplitMix64::new(2024);
        let a = DenseMatrix::from_fn(n, n, |r, c| {
            if r == c {
                6.0 + rng.next_f64()
            } else {
                0.08 * rng.next_sym()
            }
        });
        let x_true = rng.vector(n);
        let b = a.matvec(&x_true);
        let cfg = CgsConfig::with_tol(1e-12);
        let rep = cgs_solve(&a, &b, &vec![0.0; n], &cfg).unwrap();
        assert!(!rep.maxit_hit);
        assert!(*rep.residuals.last().unwrap() <= 10.0 * cfg.tol);
        for (x, want) in rep.solution.iter().zip(&x_true) {
            assert!((x - want).abs() < 1e-9);
        }
    }

    #[test]
    fn maxit_is_flagged_and_best_iterate_returned() {
        let n = 40;
        let mut rng = SplitMix64::new(77);
        let a = DenseMatrix::from_fn(n, n, |r, c| {
            if r == c {
                2.0
            } else {
                0.4 * rng.next_sym()
            }
        });
        let b = vec![1.0; n];
        let mut cfg = CgsConfig::new(1e-14, 1);
        cfg.record_history = true;
        let rep = cgs_solve(&a, &b, &vec![0.0; n], &cfg).unwrap();
        assert!(rep.maxit_hit);
        assert_eq!(rep.iterations_per_step, vec![1]);
        assert!(rep.residuals.len() >= 2);
    }
}
