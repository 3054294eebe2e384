//! Dense univariate polynomials and their kernel-weighted moments.
//!
//! Manufactured sources for the 1D and multiplicative-kernel problems need
//! `∫_a^b p(y) |x - y|^{-gamma} dy` for polynomial `p` in closed form: shift
//! `p` to powers of `(y - x)` and use the elementary antiderivatives of
//! `t^j |t|^{-gamma}`.

/// Ascending coefficients: `c[0] + c[1] x + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    c: Vec<f64>,
}

impl Poly {
    pub fn new(c: Vec<f64>) -> Self {
        assert!(!c.is_empty());
        Self { c }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    /// Coefficients of `p(x + t)` in powers of `t`, by repeated synthetic
    /// division by `(y - x)`.
    pub fn shifted(&self, x: f64) -> Vec<f64> {
        let n = self.c.len();
        let mut work = self.c.clone();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            // Divide work by (y - x): quotient in place, remainder out.
            let d = work.len() - 1;
            if d == 0 {
                out.push(work[0]);
                break;
            }
            let mut quot = vec![0.0; d];
            quot[d - 1] = work[d];
            for i in (0..d - 1).rev() {
                quot[i] = work[i + 1] + x * quot[i + 1];
            }
            let rem = work[0] + x * quot[0];
            out.push(rem);
            work = quot;
        }
        out
    }

    /// `∫_a^b p(y) |x - y|^{-gamma} dy`, exact up to rounding.
    pub fn weighted_kernel_moment(&self, a: f64, b: f64, x: f64, gamma: f64) -> f64 {
        let shifted = self.shifted(x);
        let mut acc = 0.0;
        for (j, &cj) in shifted.iter().enumerate() {
            acc += cj * power_moment(j, a - x, b - x, gamma);
        }
        acc
    }
}

/// `∫_lo^hi t^j |t|^{-gamma} dt` over a signed interval.
pub fn power_moment(j: usize, lo: f64, hi: f64, gamma: f64) -> f64 {
    let e = j as f64 + 1.0 - gamma;
    let anti = |t: f64| t.powf(e) / e;
    if lo >= 0.0 {
        anti(hi) - anti(lo)
    } else if hi <= 0.0 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sign * (anti(-lo) - anti(-hi))
    } else {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sign * anti(-lo) + anti(hi)
    }
}
