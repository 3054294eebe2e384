//! Block-Toeplitz with circulant blocks, diagonalized as a BCCB matrix.
//!
//! The additive-kernel operator splits into four global blocks (families),
//! each block-Toeplitz over x-offsets with an inner `(2My-1)^2` block of four
//! y-direction Toeplitz sub-blocks. One inner block is embedded into a
//! `9My x 9My` circulant whose first block column stacks the four embedded
//! sub-blocks with five filler Toeplitz blocks `S1..S5` in between; the filler
//! content never reaches the extracted entries. Stacking these circulants over
//! x-offsets gives a block-Toeplitz-circulant-block matrix, which is embedded
//! in a block-circulant (BCCB) matrix and diagonalized by a 2D DFT. Power-of-
//! two zero padding on both levels keeps the transforms radix-2 and leaves
//! every extracted entry exact.

use super::complex::Complex;
use super::fft::{fft2, next_pow2};
use crate::analysis::DenseMatrix;
use crate::error::CoreError;

/// The four y-direction Toeplitz symbols of one x-offset block:
/// `t_m` ((My-1)^2, symmetric), `t_q` ((My-1) x My), `t_p` (My x (My-1)),
/// `t_n` (My^2, symmetric). Lengths: `My-1, My-1, My-1, My`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerBlockSymbols {
    pub t_m: Vec<f64>,
    pub t_q: Vec<f64>,
    pub t_p: Vec<f64>,
    pub t_n: Vec<f64>,
}

impl InnerBlockSymbols {
    pub fn zeros(my: usize) -> Self {
        Self {
            t_m: vec![0.0; my - 1],
            t_q: vec![0.0; my - 1],
            t_p: vec![0.0; my - 1],
            t_n: vec![0.0; my],
        }
    }

    pub fn my(&self) -> usize {
        self.t_n.len()
    }

    fn check(&self) -> Result<(), CoreError> {
        let my = self.my();
        for v in [&self.t_m, &self.t_q, &self.t_p] {
            if v.len() != my - 1 {
                return Err(CoreError::DimensionMismatch { expected: my - 1, got: v.len() });
            }
        }
        Ok(())
    }

    /// Entries of the embedded `My x My` sub-blocks at signed offset
    /// `o = row - col`; the embedding pads each symbol with a single zero.
    fn emb_m(&self, o: isize) -> f64 {
        let a = o.unsigned_abs();
        if a < self.t_m.len() {
            self.t_m[a]
        } else {
            0.0
        }
    }

    fn emb_q(&self, o: isize) -> f64 {
        let idx = if o >= 0 { o as usize } else { (-o - 1) as usize };
        if idx < self.t_q.len() {
            self.t_q[idx]
        } else {
            0.0
        }
    }

    fn emb_p(&self, o: isize) -> f64 {
        let idx = if o >= 1 { (o - 1) as usize } else { (-o) as usize };
        if idx < self.t_p.len() {
            self.t_p[idx]
        } else {
            0.0
        }
    }

    fn emb_n(&self, o: isize) -> f64 {
        let a = o.unsigned_abs();
        if a < self.t_n.len() {
            self.t_n[a]
        } else {
            0.0
        }
    }

    /// Dense `(2My-1)^2` block `[T_M T_Q; T_P T_N]` in canonical y-ordering.
    pub fn dense(&self) -> DenseMatrix {
        let my = self.my();
        let n = 2 * my - 1;
        DenseMatrix::from_fn(n, n, |r, c| {
            let (r_half, ri) = if r < my - 1 { (false, r) } else { (true, r - (my - 1)) };
            let (c_half, ci) = if c < my - 1 { (false, c) } else { (true, c - (my - 1)) };
            let o = ri as isize - ci as isize;
            match (r_half, c_half) {
                (false, false) => self.emb_m(o),
                (false, true) => self.emb_q(o),
                (true, false) => self.emb_p(o),
                (true, true) => self.emb_n(o),
            }
        })
    }

    /// First column of the `9My x 9My` circulant holding the four embedded
    /// sub-blocks; block rows top to bottom are
    /// `S1, S5, T_N, S4, T_P, S3, T_Q, S2, T_M`.
    pub fn circulant_first_column(&self) -> Vec<f64> {
        let my = self.my();
        let myi = my as isize;
        let mut c9 = vec![0.0; 9 * my];
        for i in 1..my {
            let ii = i as isize;
            c9[i] = self.emb_m(ii); // S1: zero diagonal over T_M's column
            c9[my + i] = self.emb_n(ii - myi); // S5: T_N's last column
            c9[3 * my + i] = self.emb_p(ii - myi); // S4: T_P's last column
            c9[5 * my + i] = self.emb_q(ii - myi); // S3: T_Q's last column
            c9[7 * my + i] = self.emb_m(ii - myi); // S2: T_M's last column
        }
        for i in 0..my {
            let ii = i as isize;
            c9[2 * my + i] = self.emb_n(ii);
            c9[4 * my + i] = self.emb_p(ii);
            c9[6 * my + i] = self.emb_q(ii);
            c9[8 * my + i] = self.emb_m(ii);
        }
        c9
    }
}

/// Where the (4.2)-style layout keeps its payload: input slots 1 and 3 of the
/// nine block slots carry the integer-y and half-y input parts; output slots
/// 0 and 5 carry the integer-y and half-y results.
const IN_SLOT_INT: usize = 1;
const IN_SLOT_HALF: usize = 3;
const OUT_SLOT_INT: usize = 0;
const OUT_SLOT_HALF: usize = 5;

/// One family (`M`, `Q`, `P` or `N` position) of the additive operator:
/// `out_rows x out_cols` outer blocks, each an inner `9My` circulant, with the
/// 2D spectrum of the whole BCCB embedding cached.
#[derive(Debug, Clone)]
pub struct BtcbFamily {
    out_rows: usize,
    out_cols: usize,
    my: usize,
    m_in: usize,
    m_out: usize,
    spectrum: Vec<Complex>,
}

impl BtcbFamily {
    /// Builds the family from a map of outer offsets (`row_block - col_block`,
    /// in `-(out_cols-1)..=out_rows-1`) to inner block symbols.
    pub fn new(
        out_rows: usize,
        out_cols: usize,
        block_of: impl Fn(isize) -> InnerBlockSymbols,
    ) -> Result<Self, CoreError> {
        Self::with_min_outer(out_rows, out_cols, 1, block_of)
    }

    /// Like [`BtcbFamily::new`] with a floor on the outer embedding size, so
    /// several families can share transform dimensions.
    pub fn with_min_outer(
        out_rows: usize,
        out_cols: usize,
        min_outer: usize,
        block_of: impl Fn(isize) -> InnerBlockSymbols,
    ) -> Result<Self, CoreError> {
        assert!(out_rows >= 1 && out_cols >= 1);
        let probe = block_of(0);
        probe.check()?;
        let my = probe.my();
        let inner_len = 9 * my;
        let m_in = next_pow2(inner_len).max(2);
        let m_out = next_pow2((out_rows + out_cols - 1).max(min_outer)).max(2);

        // Symbol grid: row (delta mod m_out) holds the padded first column of
        // the inner circulant at outer offset delta. The inner padding keeps
        // positive offsets 0..5My-1 in place and wraps negative offsets
        // -(4My-1)..-1 to the tail; the extracted entries only ever read that
        // band.
        let mut grid = vec![Complex::ZERO; m_out * m_in];
        for delta in -(out_cols as isize - 1)..=(out_rows as isize - 1) {
            let b = block_of(delta);
            b.check()?;
            if b.my() != my {
                return Err(CoreError::DimensionMismatch { expected: my, got: b.my() });
            }
            let c9 = b.circulant_first_column();
            let row = delta.rem_euclid(m_out as isize) as usize;
            let base = row * m_in;
            for (k, v) in c9.iter().enumerate().take(5 * my) {
                grid[base + k] = Complex::real(*v);
            }
            for j in 1..4 * my {
                grid[base + m_in - j] = Complex::real(c9[inner_len - j]);
            }
        }
        fft2(&mut grid, m_out, m_in, false);
        Ok(Self { out_rows, out_cols, my, m_in, m_out, spectrum: grid })
    }

    pub fn out_rows(&self) -> usize {
        self.out_rows
    }

    pub fn out_cols(&self) -> usize {
        self.out_cols
    }

    pub fn my(&self) -> usize {
        self.my
    }

    /// Inner slice length `2My - 1`.
    pub fn slice_len(&self) -> usize {
        2 * self.my - 1
    }

    /// Applies the family to `out_cols` stacked canonical y-slices and returns
    /// `out_rows` stacked slices.
    pub fn apply(&self, input: &[f64]) -> Result<Vec<f64>, CoreError> {
        let sl = self.slice_len();
        if input.len() != self.out_cols * sl {
            return Err(CoreError::DimensionMismatch {
                expected: self.out_cols * sl,
                got: input.len(),
            });
        }
        let mut grid = vec![Complex::ZERO; self.m_out * self.m_in];
        self.fill_input_grid(input, &mut grid);
        fft2(&mut grid, self.m_out, self.m_in, false);
        for (g, s) in grid.iter_mut().zip(&self.spectrum) {
            *g = *g * *s;
        }
        fft2(&mut grid, self.m_out, self.m_in, true);
        Ok(self.extract_output_grid(&grid))
    }

    /// Reals held by the cached spectrum.
    pub fn storage_len(&self) -> usize {
        2 * self.spectrum.len()
    }

    /// Transform dimensions `(m_out, m_in)` of the embedding.
    pub fn transform_dims(&self) -> (usize, usize) {
        (self.m_out, self.m_in)
    }

    pub fn spectrum(&self) -> &[Complex] {
        &self.spectrum
    }

    /// Writes `out_cols` canonical slices into a transform grid.
    pub fn fill_input_grid(&self, input: &[f64], grid: &mut [Complex]) {
        debug_assert_eq!(grid.len(), self.m_out * self.m_in);
        debug_assert_eq!(input.len(), self.out_cols * self.slice_len());
        let my = self.my;
        let sl = self.slice_len();
        for c in 0..self.out_cols {
            let slice = &input[c * sl..(c + 1) * sl];
            let base = c * self.m_in;
            for (i, &v) in slice[..my - 1].iter().enumerate() {
                grid[base + IN_SLOT_INT * my + i] = Complex::real(v);
            }
            for (i, &v) in slice[my - 1..].iter().enumerate() {
                grid[base + IN_SLOT_HALF * my + i] = Complex::real(v);
            }
        }
    }

    /// Reads `out_rows` canonical slices out of a back-transformed grid.
    pub fn extract_output_grid(&self, grid: &[Complex]) -> Vec<f64> {
        let my = self.my;
        let sl = self.slice_len();
        let mut out = vec![0.0; self.out_rows * sl];
        for r in 0..self.out_rows {
            let base = r * self.m_in;
            let dst = &mut out[r * sl..(r + 1) * sl];
            for (i, d) in dst[..my - 1].iter_mut().enumerate() {
                *d = grid[base + OUT_SLOT_INT * my + i].re;
            }
            for (i, d) in dst[my - 1..].iter_mut().enumerate() {
                *d = grid[base + OUT_SLOT_HALF * my + i].re;
            }
        }
        out
    }
}

/// Free-function form of the family product.
pub fn btcb_apply(family: &BtcbFamily, u_part: &[f64]) -> Result<Vec<f64>, CoreError> {
    family.apply(u_part)
}

/// Dense expansion of a whole family; test oracles and diagnostics only.
pub fn family_dense(
    out_rows: usize,
    out_cols: usize,
    block_of: impl Fn(isize) -> InnerBlockSymbols,
) -> DenseMatrix {
    let probe = block_of(0);
    let sl = 2 * probe.my() - 1;
    let mut dense = DenseMatrix::zeros(out_rows * sl, out_cols * sl);
    for br in 0..out_rows {
        for bc in 0..out_cols {
            let blk = block_of(br as isize - bc as isize).dense();
            for r in 0..sl {
                for c in 0..sl {
                    dense.set(br * sl + r, bc * sl + c, blk.get(r, c));
                }
            }
        }
    }
    dense
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{norm_inf, SplitMix64};

    fn random_symbols(my: usize, rng: &mut SplitMix64) -> InnerBlockSymbols {
        InnerBlockSymbols {
            t_m: (0..my - 1).map(|_| rng.next_sym()).collect(),
            t_q: (0..my - 1).map(|_| rng.next_sym()).collect(),
            t_p: (0..my - 1).map(|_| rng.next_sym()).collect(),
            t_n: (0..my).map(|_| rng.next_sym()).collect(),
        }
    }

    /// Dense circulant generated by cyclically shifting a first column.
    fn circulant_dense(col: &[f64]) -> DenseMatrix {
        let n = col.len();
        DenseMatrix::from_fn(n, n, |r, c| col[(r + n - c) % n])
    }

    /// Expanded `9My` input for one slice: integer part in slot 1 (padded),
    /// half part in slot 3.
    fn expand_slice(slice: &[f64], my: usize) -> Vec<f64> {
        let mut x = vec![0.0; 9 * my];
        x[IN_SLOT_INT * my..IN_SLOT_INT * my + my - 1].copy_from_slice(&slice[..my - 1]);
        x[IN_SLOT_HALF * my..IN_SLOT_HALF * my + my].copy_from_slice(&slice[my - 1..]);
        x
    }

    #[test]
    fn inner_circulant_places_the_four_blocks_where_the_layout_says() {
        let my = 3;
        let mut rng = SplitMix64::new(1);
        let sym = random_symbols(my, &mut rng);
        let c9 = sym.circulant_first_column();
        let dense = circulant_dense(&c9);
        // Block (row 0, col 1) is the embedded T_M, (0,3) T_Q, (5,1) T_P,
        // (5,3) T_N.
        for r in 0..my {
            for c in 0..my {
                let o = r as isize - c as isize;
                assert_eq!(dense.get(r, my + c), sym.emb_m(o), "T_M at ({r},{c})");
                assert_eq!(dense.get(r, 3 * my + c), sym.emb_q(o), "T_Q");
                assert_eq!(dense.get(5 * my + r, my + c), sym.emb_p(o), "T_P");
                assert_eq!(dense.get(5 * my + r, 3 * my + c), sym.emb_n(o), "T_N");
            }
        }
    }

    #[test]
    fn inner_circulant_product_reproduces_the_block_product() {
        let mut rng = SplitMix64::new(2);
        for my in [2usize, 3, 5] {
            let sym = random_symbols(my, &mut rng);
            let slice = rng.vector(2 * my - 1);
            let big = circulant_dense(&sym.circulant_first_column());
            let y = big.matvec(&expand_slice(&slice, my));
            let want = sym.dense().matvec(&slice);
            for i in 0..my - 1 {
                assert!((y[OUT_SLOT_INT * my + i] - want[i]).abs() < 1e-12);
            }
            for i in 0..my {
                assert!((y[OUT_SLOT_HALF * my + i] - want[my - 1 + i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn filler_blocks_are_inert_for_extracted_entries() {
        // Zero out every block that is not one of the four payload positions
        // and check the extracted entries do not change.
        let my = 3;
        let mut rng = SplitMix64::new(3);
        let sym = random_symbols(my, &mut rng);
        let full = circulant_dense(&sym.circulant_first_column());
        let mut stripped = full.clone();
        for br in 0..9usize {
            for bc in 0..9usize {
                // Payload blocks sit where (br - bc) mod 9 is 8 (T_M), 6
                // (T_Q), 4 (T_P) or 2 (T_N).
                let pos = (br + 9 - bc) % 9;
                if !matches!(pos, 2 | 4 | 6 | 8) {
                    for r in 0..my {
                        for c in 0..my {
                            stripped.set(br * my + r, bc * my + c, 0.0);
                        }
                    }
                }
            }
        }
        let x = expand_slice(&rng.vector(2 * my - 1), my);
        let y_full = full.matvec(&x);
        let y_stripped = stripped.matvec(&x);
        for i in 0..my - 1 {
            let k = OUT_SLOT_INT * my + i;
            assert!((y_full[k] - y_stripped[k]).abs() < 1e-13);
        }
        for i in 0..my {
            let k = OUT_SLOT_HALF * my + i;
            assert!((y_full[k] - y_stripped[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn family_apply_matches_dense_family_product() {
        let mut rng = SplitMix64::new(4);
        for &(rows, cols, my) in
            &[(3usize, 3usize, 3usize), (2, 3, 2), (3, 2, 4), (1, 1, 2), (4, 4, 5)]
        {
            let offsets: std::collections::HashMap<isize, InnerBlockSymbols> =
                (-(cols as isize - 1)..=(rows as isize - 1))
                    .map(|d| (d, random_symbols(my, &mut rng)))
                    .collect();
            let block_of = |d: isize| offsets[&d].clone();
            let fam = BtcbFamily::new(rows, cols, block_of).unwrap();
            let x = rng.vector(cols * (2 * my - 1));
            let fast = fam.apply(&x).unwrap();
            let dense = family_dense(rows, cols, |d| offsets[&d].clone()).matvec(&x);
            let scale = norm_inf(&dense).max(1.0);
            for (a, b) in fast.iter().zip(&dense) {
                assert!(
                    (a - b).abs() < 1e-12 * scale,
                    "({rows},{cols},{my}): {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn zero_blocks_give_zero_output() {
        let fam = BtcbFamily::new(3, 3, |_| InnerBlockSymbols::zeros(3)).unwrap();
        let y = fam.apply(&vec![1.0; 3 * 5]).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn family_apply_is_linear() {
        let mut rng = SplitMix64::new(6);
        let offsets: std::collections::HashMap<isize, InnerBlockSymbols> =
            (-2isize..=2).map(|d| (d, random_symbols(3, &mut rng))).collect();
        let fam = BtcbFamily::new(3, 3, |d| offsets[&d].clone()).unwrap();
        let u = rng.vector(3 * 5);
        let v = rng.vector(3 * 5);
        let (a, b) = (0.3, -2.1);
        let mixed: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = fam.apply(&mixed).unwrap();
        let fu = fam.apply(&u).unwrap();
        let fv = fam.apply(&v).unwrap();
        for i in 0..lhs.len() {
            assert!((lhs[i] - (a * fu[i] + b * fv[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn bccb_embedding_is_a_cyclic_shift_of_its_first_column() {
        // Build the dense BCCB from the same symbol grid the spectrum uses and
        // check the fast product agrees with it: the whole embedding is the
        // cyclic shift structure in both levels.
        let my = 2;
        let (rows, cols) = (2usize, 2usize);
        let mut rng = SplitMix64::new(5);
        let offsets: std::collections::HashMap<isize, InnerBlockSymbols> =
            (-(cols as isize - 1)..=(rows as isize - 1))
                .map(|d| (d, random_symbols(my, &mut rng)))
                .collect();
        let fam = BtcbFamily::new(rows, cols, |d| offsets[&d].clone()).unwrap();
        let (m_out, m_in) = (fam.m_out, fam.m_in);

        // Reconstruct the symbol grid exactly as `new` does.
        let mut sym_grid = vec![0.0; m_out * m_in];
        for delta in -(cols as isize - 1)..=(rows as isize - 1) {
            let c9 = offsets[&delta].circulant_first_column();
            let row = delta.rem_euclid(m_out as isize) as usize;
            for (k, v) in c9.iter().enumerate().take(5 * my) {
                sym_grid[row * m_in + k] = *v;
            }
            for j in 1..4 * my {
                sym_grid[row * m_in + m_in - j] = c9[9 * my - j];
            }
        }
        // Dense BCCB: entry ((rb,ri),(cb,ci)) = grid[(rb-cb) mod][(ri-ci) mod].
        let n = m_out * m_in;
        let bccb = DenseMatrix::from_fn(n, n, |r, c| {
            let (rb, ri) = (r / m_in, r % m_in);
            let (cb, ci) = (c / m_in, c % m_in);
            sym_grid[((rb + m_out - cb) % m_out) * m_in + (ri + m_in - ci) % m_in]
        });
        // Column 0 of the dense BCCB is the flattened grid: the matrix is the
        // cyclic shift family of its own first column.
        for r in 0..n {
            assert_eq!(bccb.get(r, 0), sym_grid[r]);
        }

        // Expanded input, dense product, extraction: must equal fam.apply.
        let x = rng.vector(cols * (2 * my - 1));
        let mut big_x = vec![0.0; n];
        for c in 0..cols {
            let ex = expand_slice(&x[c * (2 * my - 1)..(c + 1) * (2 * my - 1)], my);
            big_x[c * m_in..c * m_in + 9 * my].copy_from_slice(&ex);
        }
        let big_y = bccb.matvec(&big_x);
        let fast = fam.apply(&x).unwrap();
        for r in 0..rows {
            for i in 0..my - 1 {
                let a = big_y[r * m_in + OUT_SLOT_INT * my + i];
                let b = fast[r * (2 * my - 1) + i];
                assert!((a - b).abs() < 1e-12);
            }
            for i in 0..my {
                let a = big_y[r * m_in + OUT_SLOT_HALF * my + i];
                let b = fast[r * (2 * my - 1) + my - 1 + i];
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
