//! FFT-backed application of the 1D collocation operator.

use super::toeplitz::{embed_rectangular, CirculantSpectrum, ToeplitzSymbol};
use crate::error::CoreError;
use crate::pqc::StructuredOperator1D;

/// A 1D operator with cached circulant spectra for its four Toeplitz blocks.
///
/// `apply` computes `A u = D u - G u` with four FFT products: the square
/// blocks `M` (integer-integer) and `N` (half-half) directly, the rectangular
/// blocks `P` and `Q` through their square embeddings. Results are bitwise
/// reproducible for a fixed size because the FFT plans are deterministic.
#[derive(Debug, Clone)]
pub struct FastOperator1D {
    op: StructuredOperator1D,
    spec_m: CirculantSpectrum,
    spec_q: CirculantSpectrum,
    spec_p: CirculantSpectrum,
    spec_n: CirculantSpectrum,
}

impl FastOperator1D {
    pub fn new(op: StructuredOperator1D) -> Result<Self, CoreError> {
        let c = op.coeffs();
        let spec_m = CirculantSpectrum::from_symbol(&ToeplitzSymbol::symmetric(&c.m));
        let spec_n = CirculantSpectrum::from_symbol(&ToeplitzSymbol::symmetric(&c.n));

        let m_el = op.grid().elements();
        // P is M x (M-1): first column p_0, p_0, p_1, ..., p_{M-2}; first row
        // p_0, p_1, ..., p_{M-2}.
        let mut p_col = Vec::with_capacity(m_el);
        p_col.push(c.p[0]);
        p_col.extend_from_slice(&c.p);
        let p_sym = ToeplitzSymbol::new(p_col, c.p.clone())?;
        let spec_p = CirculantSpectrum::from_symbol(&embed_rectangular(&p_sym)?);

        // Q is (M-1) x M: first column q_0, q_1, ..., q_{M-2}; first row
        // q_0, q_0, q_1, ..., q_{M-2}.
        let mut q_row = Vec::with_capacity(m_el);
        q_row.push(c.q[0]);
        q_row.extend_from_slice(&c.q);
        let q_sym = ToeplitzSymbol::new(c.q.clone(), q_row)?;
        let spec_q = CirculantSpectrum::from_symbol(&embed_rectangular(&q_sym)?);

        Ok(Self { op, spec_m, spec_q, spec_p, spec_n })
    }

    pub fn inner(&self) -> &StructuredOperator1D {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    fn m_el(&self) -> usize {
        self.op.grid().elements()
    }

    /// `G u`: the four Toeplitz products in block form.
    pub fn apply_g(&self, u: &[f64]) -> Result<Vec<f64>, CoreError> {
        let n = self.dim();
        if u.len() != n {
            return Err(CoreError::DimensionMismatch { expected: n, got: u.len() });
        }
        let m_el = self.m_el();
        let (w, v) = u.split_at(m_el - 1);

        // Integer output rows: M w + Q v (embedded Q emits one extra row).
        let mw = self.spec_m.apply(w)?;
        let qv = self.spec_q.apply(v)?;
        // Half output rows: P w + N v; P wants its input padded by one zero.
        let mut w_pad = w.to_vec();
        w_pad.push(0.0);
        let pw = self.spec_p.apply(&w_pad)?;
        let nv = self.spec_n.apply(v)?;

        let mut out = Vec::with_capacity(n);
        for i in 0..m_el - 1 {
            out.push(mw[i] + qv[i]);
        }
        for i in 0..m_el {
            out.push(pw[i] + nv[i]);
        }
        Ok(out)
    }

    /// `A u = D u - G u`.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>, CoreError> {
        let mut g = self.apply_g(u)?;
        let d = &self.op.coeffs().d_int;
        for ((y, &du), &ui) in g.iter_mut().zip(d).zip(u) {
            *y = du * ui - *y;
        }
        Ok(g)
    }

    /// Pure diagonal `D` in canonical order.
    pub fn diag(&self) -> &[f64] {
        &self.op.coeffs().d_int
    }

    pub fn boundary_vector(&self, u_left: f64, u_right: f64) -> Vec<f64> {
        self.op.boundary_vector(u_left, u_right)
    }

    /// Reals held by the structured representation: coefficient table plus
    /// the four cached half-spectra. No dense array is ever allocated.
    pub fn storage_len(&self) -> usize {
        self.op.storage_len()
            + self.spec_m.storage_len()
            + self.spec_q.storage_len()
            + self.spec_p.storage_len()
            + self.spec_n.storage_len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pqc::{assemble_operator, CollocationGrid, WeaklySingularKernel};
    use crate::util::{norm_inf, SplitMix64};

    fn fast(a: f64, b: f64, m: usize, gamma: f64) -> FastOperator1D {
        let grid = CollocationGrid::new(a, b, m).unwrap();
        let kernel = WeaklySingularKernel::new(gamma).unwrap();
        FastOperator1D::new(assemble_operator(&grid, &kernel).unwrap()).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let op = fast(0.0, 1.0, 8, 0.5);
        let y = op.apply(&vec![0.0; op.dim()]).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ones_reproduce_the_boundary_defect() {
        for &m in &[2usize, 5, 16, 64] {
            let op = fast(0.0, 1.0, m, 0.4);
            let y = op.apply(&vec![1.0; op.dim()]).unwrap();
            let k = op.boundary_vector(1.0, 1.0);
            let diff: Vec<f64> = y.iter().zip(&k).map(|(a, b)| a - b).collect();
            assert!(norm_inf(&diff) < 1e-10, "defect {} at M = {m}", norm_inf(&diff));
        }
    }

    #[test]
    fn fast_apply_matches_dense_apply() {
        let mut rng = SplitMix64::new(77);
        for &gamma in &[0.2, 0.5, 0.8] {
            for &m in &[2usize, 3, 16, 32] {
                let op = fast(-0.5, 1.5, m, gamma);
                let dense = op.inner().dense();
                let u = rng.vector(op.dim());
                let fast_y = op.apply(&u).unwrap();
                let dense_y = dense.matvec(&u);
                let scale = norm_inf(&dense_y).max(1.0);
                for (a, b) in fast_y.iter().zip(&dense_y) {
                    assert!(
                        (a - b).abs() < 1e-11 * scale,
                        "M = {m}, gamma = {gamma}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_wrong_length() {
        let op = fast(0.0, 1.0, 4, 0.5);
        assert!(op.apply(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn storage_stays_linear_in_m() {
        for &m in &[16usize, 128, 1024] {
            let op = fast(0.0, 1.0, m, 0.5);
            assert!(
                op.storage_len() <= 16 * m,
                "storage {} exceeds 16 M at M = {m}",
                op.storage_len()
            );
        }
    }
}
