use crate::error::CoreError;
use crate::pqc::CollocationGrid;

/// Tensor collocation grid on `(a, b) x (c, d)`.
///
/// Interior unknowns are ordered x-major with the canonical 1D ordering in
/// both directions: x-slices run over integer x-points first, then half
/// x-points; within one slice, integer y-points first, then half y-points.
#[derive(Debug, Clone, Copy)]
pub struct Grid2D {
    pub gx: CollocationGrid,
    pub gy: CollocationGrid,
}

impl Grid2D {
    pub fn new(gx: CollocationGrid, gy: CollocationGrid) -> Self {
        Self { gx, gy }
    }

    pub fn square(a: f64, b: f64, m: usize) -> Result<Self, CoreError> {
        let g = CollocationGrid::new(a, b, m)?;
        Ok(Self { gx: g, gy: g })
    }

    pub fn nx(&self) -> usize {
        self.gx.interior_len()
    }

    pub fn ny(&self) -> usize {
        self.gy.interior_len()
    }

    pub fn unknowns(&self) -> usize {
        self.nx() * self.ny()
    }

    /// Collocation point of the flat interior index.
    pub fn point(&self, flat: usize) -> (f64, f64) {
        let i = flat / self.ny();
        let j = flat % self.ny();
        (
            self.gx.point(self.gx.half_units_of(i)),
            self.gy.point(self.gy.half_units_of(j)),
        )
    }

    pub fn sample_interior(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let xs: Vec<f64> = (0..self.nx())
            .map(|i| self.gx.point(self.gx.half_units_of(i)))
            .collect();
        let ys: Vec<f64> = (0..self.ny())
            .map(|j| self.gy.point(self.gy.half_units_of(j)))
            .collect();
        let mut out = Vec::with_capacity(self.unknowns());
        for &x in &xs {
            for &y in &ys {
                out.push(f(x, y));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_x_major_canonical() {
        let g = Grid2D::square(0.0, 1.0, 2).unwrap();
        assert_eq!(g.unknowns(), 9);
        // x-slices: x_1, x_{1/2}, x_{3/2}; y within: y_1, y_{1/2}, y_{3/2}.
        let (x0, y0) = g.point(0);
        assert!((x0 - 0.5).abs() < 1e-15 && (y0 - 0.5).abs() < 1e-15);
        let (x4, y4) = g.point(4);
        assert!((x4 - 0.25).abs() < 1e-15 && (y4 - 0.25).abs() < 1e-15);
        let v = g.sample_interior(|x, y| x * 10.0 + y);
        assert!((v[1] - (0.5 * 10.0 + 0.25)).abs() < 1e-15);
    }
}
