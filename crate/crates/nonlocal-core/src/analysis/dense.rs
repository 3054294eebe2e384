//! Dense matrices with LU factorization. Desk-scale only: the structured
//! operators never expand themselves unless a diagnostic or a test oracle
//! asks for it.

use crate::error::CoreError;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn scaled_add(&self, other: &Self, alpha: f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            *o += alpha * v;
        }
        out
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (ra, ca) = (self.rows, self.cols);
        let (rb, cb) = (other.rows, other.cols);
        Self::from_fn(ra * rb, ca * cb, |r, c| {
            self.get(r / rb, c / cb) * other.get(r % rb, c % cb)
        })
    }

    /// Infinity norm: max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max)
    }

    /// LU with partial pivoting.
    pub fn lu(&self) -> Result<LuFactors, CoreError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = lu.get(k, k).abs();
            for r in k + 1..n {
                let v = lu.get(r, k).abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Err(CoreError::QuadratureFailure {
                    detail: format!("singular matrix in LU at column {k}"),
                });
            }
            if piv != k {
                perm.swap(piv, k);
                for c in 0..n {
                    let a = lu.get(k, c);
                    let b = lu.get(piv, c);
                    lu.set(k, c, b);
                    lu.set(piv, c, a);
                }
            }
            let d = lu.get(k, k);
            for r in k + 1..n {
                let f = lu.get(r, k) / d;
                lu.set(r, k, f);
                if f != 0.0 {
                    for c in k + 1..n {
                        let v = lu.get(r, c) - f * lu.get(k, c);
                        lu.set(r, c, v);
                    }
                }
            }
        }
        Ok(LuFactors { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, CoreError> {
        Ok(self.lu()?.solve(b))
    }

    /// `||A^{-1}||_inf`, computed column by column from the factorization.
    pub fn inverse_norm_inf(&self) -> Result<f64, CoreError> {
        let n = self.rows;
        let f = self.lu()?;
        let mut row_sums = vec![0.0f64; n];
        let mut e = vec![0.0f64; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = f.solve(&e);
            e[j] = 0.0;
            for (s, v) in row_sums.iter_mut().zip(&col) {
                *s += v.abs();
            }
        }
        Ok(row_sums.into_iter().fold(0.0f64, f64::max))
    }
}

#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 1..n {
            let mut acc = y[r];
            for c in 0..r {
                acc -= self.lu.get(r, c) * y[c];
            }
            y[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = y[r];
            for c in r + 1..n {
                acc -= self.lu.get(r, c) * y[c];
            }
            y[r] = acc / self.lu.get(r, r);
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::SplitMix64;

    #[test]
    fn lu_solves_random_system() {
        let n = 24;
        let mut rng = SplitMix64::new(11);
        let a = DenseMatrix::from_fn(n, n, |r, c| {
            if r == c {
                4.0 + rng.next_f64()
            } else {
                0.3 * rng.next_sym()
            }
        });
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.matvec(&x_true);
        let x = a.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn inverse_norm_matches_explicit_inverse_on_small_case() {
        let a = DenseMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => 2.0,
            (0, 1) => 1.0,
            (1, 0) => 0.5,
            _ => 3.0,
        });
        // inv = 1/5.5 * [3, -1; -0.5, 2]; row sums 4/5.5 and 2.5/5.5.
        let got = a.inverse_norm_inf().unwrap();
        assert!((got - 4.0 / 5.5).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = DenseMatrix::from_fn(3, 3, |r, _| r as f64);
        assert!(a.lu().is_err());
    }
}
