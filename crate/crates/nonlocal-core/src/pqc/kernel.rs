use crate::error::CoreError;

/// The weakly singular kernel `|x - y|^{-gamma}` with `0 < gamma < 1`.
///
/// The same exponent drives the 1D kernel, the 2D multiplicative kernel
/// `|x - xb|^{-gamma} |y - yb|^{-gamma}` and the 2D additive kernel
/// `((x - xb)^2 + (y - yb)^2)^{-gamma/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeaklySingularKernel {
    gamma: f64,
}

impl WeaklySingularKernel {
    pub fn new(gamma: f64) -> Result<Self, CoreError> {
        if !(gamma > 0.0 && gamma < 1.0) || !gamma.is_finite() {
            return Err(CoreError::InvalidExponent(gamma));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// 1D kernel value `|r|^{-gamma}`.
    pub fn eval_1d(&self, r: f64) -> f64 {
        r.abs().powf(-self.gamma)
    }

    /// 2D additive kernel value `(dx^2 + dy^2)^{-gamma/2}`.
    pub fn eval_additive(&self, dx: f64, dy: f64) -> f64 {
        (dx * dx + dy * dy).powf(-0.5 * self.gamma)
    }
}
