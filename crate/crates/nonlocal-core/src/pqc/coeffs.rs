//! Closed-form collocation coefficients.
//!
//! Every coefficient is the integral of one piecewise quadratic basis function
//! against the kernel, `∫ φ(y) |x - y|^{-gamma} dy`, evaluated at a collocation
//! point `x` at lattice distance `k·h` (or `(k+1/2)·h`) from the basis node.
//! The closed forms below are expressed through the scale factor
//! `eta = h^{1-gamma} / ((3-gamma)(2-gamma)(1-gamma))` and powers of the
//! lattice distance.
//!
//! The raw closed forms subtract powers that agree to `O(k^2)` relative terms,
//! so for large lattice distances they are evaluated through a four-term
//! binomial series in `1/k` instead; the switch point keeps the relative
//! rounding error of the direct form below 1e-8.

use super::{CollocationGrid, WeaklySingularKernel};
use crate::error::CoreError;

/// Lattice distance above which the series form is used.
const SERIES_THRESHOLD: f64 = 1000.0;

/// All 1D collocation coefficients for one `(grid, kernel)` pair.
///
/// Vector layout (`M` elements, `s = 3 - gamma` everywhere):
/// - `m[k]`, `k = 0..M-2`: integer basis at integer collocation, distance `k`,
/// - `n[k]`, `k = 0..M-1`: half basis at half collocation, distance `k`,
/// - `q[k]`, `k = 0..M-2`: half basis at integer collocation, distance `k+1/2`,
/// - `p[k]`, `k = 0..M-2`: integer basis at half collocation, distance `k+1/2`,
/// - `beta[i-1]`, `i = 1..M-1`: left boundary basis at integer point `x_i`,
/// - `gamma_bnd[i]`, `i = 0..M-1`: left boundary basis at `x_{i+1/2}`,
/// - `d_int`: diagonal `∫_a^b |x - y|^{-gamma} dy` at the interior collocation
///   points in canonical order (integer points, then half points).
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub eta: f64,
    pub m: Vec<f64>,
    pub n: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma_bnd: Vec<f64>,
    pub d_int: Vec<f64>,
    elements: usize,
}

/// Generalized binomial coefficient `C(s, j)` for real `s`.
fn binom(s: f64, j: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..j {
        acc *= (s - i as f64) / (i as f64 + 1.0);
    }
    acc
}

/// Coefficient evaluators for one `(gamma, h)` pair. Arguments are lattice
/// distances in units of `h` and may be half-integers.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientEval {
    pub eta: f64,
    s: f64,
}

impl CoefficientEval {
    pub fn new(gamma: f64, h: f64) -> Self {
        let s = 3.0 - gamma;
        let eta = h.powf(1.0 - gamma) / ((3.0 - gamma) * (2.0 - gamma) * (1.0 - gamma));
        Self { eta, s }
    }

    /// `m_t` for `t >= 1` (integer basis at an integer-distance collocation
    /// point; also evaluated at half-integer `t` to produce `p`).
    pub fn m_at(&self, t: f64) -> f64 {
        debug_assert!(t >= 1.0);
        let s = self.s;
        if t <= SERIES_THRESHOLD {
            self.eta
                * (4.0 * ((t + 1.0).powf(s) - (t - 1.0).powf(s))
                    - s * ((t + 1.0).powf(s - 1.0)
                        + 6.0 * t.powf(s - 1.0)
                        + (t - 1.0).powf(s - 1.0)))
        } else {
            let mut acc = 0.0;
            for j in 1..=4 {
                let c = 8.0 * binom(s, 2 * j + 1) - 2.0 * s * binom(s - 1.0, 2 * j);
                acc += c * t.powf(s - 1.0 - 2.0 * j as f64);
            }
            self.eta * acc
        }
    }

    /// `q_t` for `t >= 0` (half basis at an integer-distance collocation
    /// point; the actual distance is `t + 1/2`).
    pub fn q_at(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        let s = self.s;
        let c = t + 0.5;
        if c <= SERIES_THRESHOLD {
            self.eta
                * (-8.0 * ((t + 1.0).powf(s) - t.powf(s))
                    + 4.0 * s * ((t + 1.0).powf(s - 1.0) + t.powf(s - 1.0)))
        } else {
            let mut acc = 0.0;
            for i in 1..=4 {
                let j = 2 * i + 1;
                let coef = -16.0 * binom(s, j) * 0.5f64.powi(j as i32)
                    + 8.0 * s * binom(s - 1.0, j - 1) * 0.5f64.powi(j as i32 - 1);
                acc += coef * c.powf(s - j as f64);
            }
            self.eta * acc
        }
    }

    /// Boundary coefficient `beta_t` for `t >= 1` (half-integer `t` gives the
    /// half-point boundary coefficients).
    pub fn beta_at(&self, t: f64) -> f64 {
        debug_assert!(t >= 1.0);
        let s = self.s;
        if t <= SERIES_THRESHOLD {
            self.eta
                * (4.0 * (t.powf(s) - (t - 1.0).powf(s))
                    - s * (3.0 * t.powf(s - 1.0) + (t - 1.0).powf(s - 1.0)
                        - (s - 1.0) * t.powf(s - 2.0)))
        } else {
            let mut acc = 0.0;
            for j in 3..=6 {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                let c = sign * (4.0 * binom(s, j) - s * binom(s - 1.0, j - 1));
                acc += c * t.powf(s - j as f64);
            }
            self.eta * acc
        }
    }

    /// `m_0`: the integer basis over its own collocation point.
    pub fn m0(&self) -> f64 {
        2.0 * (4.0 - self.s) * self.eta
    }

    /// `p_0`: the integer basis seen from the adjacent half point. This is the
    /// `m` form at distance 1/2 once the powers are extended with the parity
    /// of their antiderivatives (odd for the `s` power, even for `s - 1`):
    /// `(t-1)^s` becomes `-(1/2)^s` and `(t-1)^{s-1}` becomes `(1/2)^{s-1}`.
    pub fn p0(&self) -> f64 {
        let s = self.s;
        self.eta
            * (4.0 * (1.5f64.powf(s) + 0.5f64.powf(s))
                - s * (1.5f64.powf(s - 1.0) + 7.0 * 0.5f64.powf(s - 1.0)))
    }

    /// `n_0`: the half basis over its own collocation point.
    pub fn n0(&self) -> f64 {
        // gamma = 3 - s, so 2 - gamma = s - 1 and 2^{gamma+1} = 2^{4-s}.
        self.eta * (self.s - 1.0) * 2.0f64.powf(4.0 - self.s)
    }

    /// `gamma_0`: the boundary basis seen from the first half point.
    pub fn gamma0(&self) -> f64 {
        self.eta * (self.s - 1.0) * (self.s - 2.0) * 2.0f64.powf(2.0 - self.s)
    }
}

/// Exact diagonal value `∫_a^b |x - y|^{-gamma} dy`.
pub fn diagonal_integral(a: f64, b: f64, gamma: f64, x: f64) -> f64 {
    ((x - a).powf(1.0 - gamma) + (b - x).powf(1.0 - gamma)) / (1.0 - gamma)
}

pub fn compute_coefficients(
    grid: &CollocationGrid,
    kernel: &WeaklySingularKernel,
) -> Result<CoefficientTable, CoreError> {
    let m_el = grid.elements();
    let gamma = kernel.gamma();
    let ev = CoefficientEval::new(gamma, grid.h());

    let mut m = Vec::with_capacity(m_el - 1);
    m.push(ev.m0());
    for k in 1..m_el - 1 {
        m.push(ev.m_at(k as f64));
    }

    let mut q = Vec::with_capacity(m_el - 1);
    for k in 0..m_el - 1 {
        q.push(ev.q_at(k as f64));
    }

    let mut p = Vec::with_capacity(m_el - 1);
    p.push(ev.p0());
    for k in 1..m_el - 1 {
        p.push(ev.m_at(k as f64 + 0.5));
    }

    let mut n = Vec::with_capacity(m_el);
    n.push(ev.n0());
    for k in 1..m_el {
        n.push(ev.q_at(k as f64 - 0.5));
    }

    let mut beta = Vec::with_capacity(m_el - 1);
    for i in 1..m_el {
        beta.push(ev.beta_at(i as f64));
    }

    let mut gamma_bnd = Vec::with_capacity(m_el);
    gamma_bnd.push(ev.gamma0());
    for i in 1..m_el {
        gamma_bnd.push(ev.beta_at(i as f64 + 0.5));
    }

    let d_int = grid
        .interior_points()
        .into_iter()
        .map(|x| diagonal_integral(grid.a(), grid.b(), gamma, x))
        .collect();

    Ok(CoefficientTable {
        eta: ev.eta,
        m,
        n,
        p,
        q,
        beta,
        gamma_bnd,
        d_int,
        elements: m_el,
    })
}

impl CoefficientTable {
    pub fn elements(&self) -> usize {
        self.elements
    }

    /// Off-diagonal interior coefficient: basis centered at lattice position
    /// `basis_hu` (half units, `1..2M-1`) seen from the collocation point at
    /// `colloc_hu`. Dispatches on the two parities.
    pub fn interior_coefficient(&self, colloc_hu: usize, basis_hu: usize) -> f64 {
        let delta = colloc_hu.abs_diff(basis_hu);
        match (colloc_hu % 2, basis_hu % 2) {
            (0, 0) => self.m[delta / 2],
            (1, 1) => self.n[delta / 2],
            (0, 1) => self.q[(delta - 1) / 2],
            (1, 0) => self.p[(delta - 1) / 2],
            _ => unreachable!(),
        }
    }

    /// Left-boundary coefficient (basis at `x_0`) for the collocation point at
    /// `colloc_hu`.
    pub fn boundary_left(&self, colloc_hu: usize) -> f64 {
        if colloc_hu % 2 == 0 {
            self.beta[colloc_hu / 2 - 1]
        } else {
            self.gamma_bnd[(colloc_hu - 1) / 2]
        }
    }

    /// Right-boundary coefficient (basis at `x_M`); mirror of the left one.
    pub fn boundary_right(&self, colloc_hu: usize) -> f64 {
        self.boundary_left(2 * self.elements - colloc_hu)
    }

    /// Diagonal value at the collocation point `colloc_hu`.
    pub fn diagonal_at(&self, colloc_hu: usize) -> f64 {
        let m_el = self.elements;
        if colloc_hu % 2 == 0 {
            self.d_int[colloc_hu / 2 - 1]
        } else {
            self.d_int[(m_el - 1) + (colloc_hu - 1) / 2]
        }
    }

    /// Number of stored reals; the operator storage audit sums these.
    pub fn storage_len(&self) -> usize {
        self.m.len()
            + self.n.len()
            + self.p.len()
            + self.q.len()
            + self.beta.len()
            + self.gamma_bnd.len()
            + self.d_int.len()
            + 1
    }
}
