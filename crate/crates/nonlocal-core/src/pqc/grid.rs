use crate::error::CoreError;

/// Uniform collocation grid on `[a, b]` with `M` elements of width
/// `h = (b - a) / M` and collocation points at every half step,
/// `x_{i/2} = a + i h / 2` for `i = 0..2M`.
///
/// Unknowns live at the interior points `i = 1..2M-1`; the two endpoints carry
/// Dirichlet data. Vectors over the interior use the canonical ordering of the
/// scheme: integer points `x_1..x_{M-1}` first, then half points
/// `x_{1/2}..x_{M-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollocationGrid {
    a: f64,
    b: f64,
    m: usize,
    h: f64,
}

impl CollocationGrid {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self, CoreError> {
        if !(a < b) || m < 2 || !a.is_finite() || !b.is_finite() {
            return Err(CoreError::InvalidGrid { a, b, m });
        }
        Ok(Self { a, b, m, h: (b - a) / m as f64 })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn elements(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of interior unknowns, `2M - 1`.
    pub fn interior_len(&self) -> usize {
        2 * self.m - 1
    }

    /// Collocation point `x_{i/2}` for a half-unit index `i = 0..=2M`.
    pub fn point(&self, half_units: usize) -> f64 {
        debug_assert!(half_units <= 2 * self.m);
        self.a + 0.5 * self.h * half_units as f64
    }

    /// Interior collocation points in canonical order (integer points first,
    /// then half points).
    pub fn interior_points(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.interior_len());
        for i in 1..self.m {
            pts.push(self.point(2 * i));
        }
        for i in 0..self.m {
            pts.push(self.point(2 * i + 1));
        }
        pts
    }

    /// Half-unit index of the k-th entry of a canonical interior vector.
    pub fn half_units_of(&self, k: usize) -> usize {
        debug_assert!(k < self.interior_len());
        if k < self.m - 1 {
            2 * (k + 1)
        } else {
            2 * (k - (self.m - 1)) + 1
        }
    }

    /// Samples a function at the interior collocation points, canonical order.
    pub fn sample_interior(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.interior_points().into_iter().map(f).collect()
    }
}
