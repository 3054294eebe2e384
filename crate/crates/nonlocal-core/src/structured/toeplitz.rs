//! Toeplitz matrices by symbol, their circulant embeddings and FFT products.

use super::complex::Complex;
use super::fft::{next_pow2, FftPlan};
use crate::analysis::DenseMatrix;
use crate::error::CoreError;

/// A (possibly rectangular) Toeplitz matrix described by its first column and
/// first row. Entry `(r, c)` is `first_col[r - c]` when `r >= c`, otherwise
/// `first_row[c - r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSymbol {
    first_col: Vec<f64>,
    first_row: Vec<f64>,
}

impl ToeplitzSymbol {
    pub fn new(first_col: Vec<f64>, first_row: Vec<f64>) -> Result<Self, CoreError> {
        if first_col.is_empty() || first_row.is_empty() {
            return Err(CoreError::DimensionMismatch { expected: 1, got: 0 });
        }
        if first_col[0] != first_row[0] {
            return Err(CoreError::DimensionMismatch {
                expected: first_col.len(),
                got: first_row.len(),
            });
        }
        Ok(Self { first_col, first_row })
    }

    /// Symmetric square Toeplitz from one symbol vector.
    pub fn symmetric(symbol: &[f64]) -> Self {
        Self { first_col: symbol.to_vec(), first_row: symbol.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.first_col.len()
    }

    pub fn cols(&self) -> usize {
        self.first_row.len()
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        if r >= c {
            self.first_col[r - c]
        } else {
            self.first_row[c - r]
        }
    }

    pub fn dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows(), self.cols(), |r, c| self.entry(r, c))
    }
}

/// Square embedding of the two rectangular collocation blocks.
///
/// A tall symbol (`rows == cols + 1`, the `P` shape) gains a trailing zero on
/// its first row; multiplying the embedded matrix by the input padded with a
/// trailing zero reproduces all `rows` outputs. A wide symbol
/// (`cols == rows + 1`, the `Q` shape) gains a trailing zero on its first
/// column, which appends one output row whose value is discarded.
pub fn embed_rectangular(symbol: &ToeplitzSymbol) -> Result<ToeplitzSymbol, CoreError> {
    let (r, c) = (symbol.rows(), symbol.cols());
    if r == c + 1 {
        let mut row = symbol.first_row.clone();
        row.push(0.0);
        ToeplitzSymbol::new(symbol.first_col.clone(), row)
    } else if c == r + 1 {
        let mut col = symbol.first_col.clone();
        col.push(0.0);
        ToeplitzSymbol::new(col, symbol.first_row.clone())
    } else {
        Err(CoreError::DimensionMismatch { expected: r + 1, got: c })
    }
}

/// Cached circulant embedding of a Toeplitz symbol: the DFT of the embedded
/// first column, stored as the non-redundant half of the spectrum (the input
/// is real, so the spectrum is Hermitian; for a symmetric symbol the embedded
/// column is palindromic and the spectrum is real, halving storage again).
#[derive(Debug, Clone)]
enum HalfSpectrum {
    Hermitian(Vec<Complex>),
    Real(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct CirculantSpectrum {
    rows: usize,
    cols: usize,
    embed_size: usize,
    half_spectrum: HalfSpectrum,
}

impl CirculantSpectrum {
    pub fn from_symbol(symbol: &ToeplitzSymbol) -> Self {
        let rows = symbol.rows();
        let cols = symbol.cols();
        let m = next_pow2(rows + cols - 1).max(2);
        let mut col = vec![Complex::ZERO; m];
        for (k, &v) in symbol.first_col.iter().enumerate() {
            col[k] = Complex::real(v);
        }
        for j in 1..cols {
            col[m - j] = Complex::real(symbol.first_row[j]);
        }
        FftPlan::get(m).forward(&mut col);
        let half_spectrum = if symbol.first_col == symbol.first_row {
            HalfSpectrum::Real(col[..=m / 2].iter().map(|z| z.re).collect())
        } else {
            HalfSpectrum::Hermitian(col[..=m / 2].to_vec())
        };
        Self { rows, cols, embed_size: m, half_spectrum }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn embed_size(&self) -> usize {
        self.embed_size
    }

    /// Full eigenvalue `k` of the embedding, reconstructed from the stored
    /// half by Hermitian symmetry.
    pub fn eigenvalue(&self, k: usize) -> Complex {
        let m = self.embed_size;
        let idx = if k <= m / 2 { k } else { m - k };
        match &self.half_spectrum {
            HalfSpectrum::Real(v) => Complex::real(v[idx]),
            HalfSpectrum::Hermitian(v) => {
                if k <= m / 2 {
                    v[idx]
                } else {
                    v[idx].conj()
                }
            }
        }
    }

    /// Inverse transform of the eigenvalues: the embedded first column. Used
    /// by tests to confirm the embedding round-trips.
    pub fn embedded_first_column(&self) -> Vec<f64> {
        let m = self.embed_size;
        let mut buf: Vec<Complex> = (0..m).map(|k| self.eigenvalue(k)).collect();
        FftPlan::get(m).inverse(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// `y = T x` through the circulant embedding, `O(m log m)`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        if x.len() != self.cols {
            return Err(CoreError::DimensionMismatch { expected: self.cols, got: x.len() });
        }
        let m = self.embed_size;
        let plan = FftPlan::get(m);
        let mut buf = vec![Complex::ZERO; m];
        for (b, &v) in buf.iter_mut().zip(x) {
            *b = Complex::real(v);
        }
        plan.forward(&mut buf);
        for (k, v) in buf.iter_mut().enumerate() {
            *v = *v * self.eigenvalue(k);
        }
        plan.inverse(&mut buf);
        Ok(buf[..self.rows].iter().map(|z| z.re).collect())
    }

    /// Reals held by the cached spectrum.
    pub fn storage_len(&self) -> usize {
        match &self.half_spectrum {
            HalfSpectrum::Real(v) => v.len(),
            HalfSpectrum::Hermitian(v) => 2 * v.len(),
        }
    }
}

/// One-shot Toeplitz product; builds the embedding, applies it, drops it.
pub fn toeplitz_matvec(symbol: &ToeplitzSymbol, x: &[f64]) -> Result<Vec<f64>, CoreError> {
    CirculantSpectrum::from_symbol(symbol).apply(x)
}
