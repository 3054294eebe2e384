use super::{compute_coefficients, CoefficientTable, CollocationGrid, WeaklySingularKernel};
use crate::analysis::DenseMatrix;
use crate::error::CoreError;

/// The 1D collocation operator `A = D - G` in structured (never dense) form:
/// a diagonal `D` of exact kernel integrals minus four Toeplitz blocks
/// assembled from the coefficient table,
///
/// ```text
/// A = [ D1 0 ]   [ M Q ]
///     [ 0 D2 ] - [ P N ]
/// ```
///
/// acting on interior vectors in canonical order (integer points, then half
/// points). The represented square matrix has dimension `2M - 1`, strictly
/// positive diagonal, nonpositive off-diagonal entries and strict row
/// diagonal dominance.
#[derive(Debug, Clone)]
pub struct StructuredOperator1D {
    grid: CollocationGrid,
    kernel: WeaklySingularKernel,
    coeffs: CoefficientTable,
}

pub fn assemble_operator(
    grid: &CollocationGrid,
    kernel: &WeaklySingularKernel,
) -> Result<StructuredOperator1D, CoreError> {
    let coeffs = compute_coefficients(grid, kernel)?;
    Ok(StructuredOperator1D { grid: *grid, kernel: *kernel, coeffs })
}

/// Boundary contribution `K` for Dirichlet values `u(a) = u_left`,
/// `u(b) = u_right`: the beta/gamma coefficient stacks weighted by the two
/// endpoint values.
pub fn boundary_vector(op: &StructuredOperator1D, u_left: f64, u_right: f64) -> Vec<f64> {
    op.boundary_vector(u_left, u_right)
}

impl StructuredOperator1D {
    pub fn grid(&self) -> &CollocationGrid {
        &self.grid
    }

    pub fn kernel(&self) -> &WeaklySingularKernel {
        &self.kernel
    }

    pub fn coeffs(&self) -> &CoefficientTable {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.grid.interior_len()
    }

    pub fn boundary_vector(&self, u_left: f64, u_right: f64) -> Vec<f64> {
        let n = self.dim();
        let mut k = Vec::with_capacity(n);
        for idx in 0..n {
            let hu = self.grid.half_units_of(idx);
            k.push(self.coeffs.boundary_left(hu) * u_left + self.coeffs.boundary_right(hu) * u_right);
        }
        k
    }

    /// Entry of the represented matrix, by interior indices in canonical order.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let hu_r = self.grid.half_units_of(row);
        let hu_c = self.grid.half_units_of(col);
        let diag = if row == col { self.coeffs.diagonal_at(hu_r) } else { 0.0 };
        diag - self.coeffs.interior_coefficient(hu_r, hu_c)
    }

    /// Dense expansion of `A`; test oracles and spectral diagnostics only.
    pub fn dense(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |r, c| self.entry(r, c))
    }

    /// Dense expansion of the positive part `G` alone.
    pub fn dense_g(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |r, c| {
            self.coeffs
                .interior_coefficient(self.grid.half_units_of(r), self.grid.half_units_of(c))
        })
    }

    /// Diagonal of `A` in canonical order: `d - m_0` at integer points,
    /// `d - n_0` at half points.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|idx| {
                let hu = self.grid.half_units_of(idx);
                let own = self.coeffs.interior_coefficient(hu, hu);
                self.coeffs.diagonal_at(hu) - own
            })
            .collect()
    }

    /// Reals stored by the structured representation.
    pub fn storage_len(&self) -> usize {
        self.coeffs.storage_len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::norm_inf;

    fn op(a: f64, b: f64, m: usize, gamma: f64) -> StructuredOperator1D {
        let grid = CollocationGrid::new(a, b, m).unwrap();
        let kernel = WeaklySingularKernel::new(gamma).unwrap();
        assemble_operator(&grid, &kernel).unwrap()
    }

    #[test]
    fn smallest_grid_has_the_forced_block_structure() {
        let o = op(0.0, 2.0, 2, 0.5);
        assert_eq!(o.dim(), 3);
        let c = o.coeffs();
        let a = o.dense();
        // Row/col 0 is the single integer point; rows/cols 1, 2 the half points.
        assert!((a.get(0, 0) - (c.diagonal_at(2) - c.m[0])).abs() < 1e-15);
        assert!((a.get(0, 1) + c.q[0]).abs() < 1e-15);
        assert!((a.get(0, 2) + c.q[0]).abs() < 1e-15);
        assert!((a.get(1, 0) + c.p[0]).abs() < 1e-15);
        assert!((a.get(2, 0) + c.p[0]).abs() < 1e-15);
        assert!((a.get(1, 2) + c.n[1]).abs() < 1e-15);
        assert!((a.get(2, 1) + c.n[1]).abs() < 1e-15);
        assert!((a.get(1, 1) - (c.diagonal_at(1) - c.n[0])).abs() < 1e-15);
    }

    #[test]
    fn sign_pattern_and_strict_dominance() {
        for &gamma in &[0.2, 0.5, 0.8] {
            let o = op(0.0, 1.0, 8, gamma);
            let a = o.dense();
            let n = a.rows();
            for r in 0..n {
                let mut off = 0.0;
                for c in 0..n {
                    if r == c {
                        assert!(a.get(r, c) > 0.0);
                    } else {
                        assert!(a.get(r, c) <= 0.0, "positive off-diagonal at ({r},{c})");
                        off += a.get(r, c).abs();
                    }
                }
                assert!(a.get(r, r) > off, "row {r} not strictly dominant");
            }
        }
    }

    #[test]
    fn diagonal_entries_below_the_interval_bound() {
        for &(a0, b0) in &[(0.0, 1.0), (-1.0, 2.5)] {
            for &gamma in &[0.2, 0.5, 0.8] {
                let o = op(a0, b0, 16, gamma);
                let bound = 2.0 * (b0 - a0).powf(1.0 - gamma) / (1.0 - gamma);
                for v in o.diagonal() {
                    assert!(v > 0.0 && v < bound);
                }
            }
        }
    }

    #[test]
    fn constants_are_annihilated_up_to_boundary_data() {
        // A * 1 must equal the boundary vector with unit endpoint values; this
        // one identity cross-checks d, m, n, p, q, beta and gamma at once.
        for &m in &[2usize, 8, 33, 256] {
            for &gamma in &[0.2, 0.5, 0.8] {
                let o = op(0.0, 1.0, m, gamma);
                let a = o.dense();
                let ones = vec![1.0; o.dim()];
                let lhs = a.matvec(&ones);
                let k = o.boundary_vector(1.0, 1.0);
                let diff: Vec<f64> = lhs.iter().zip(&k).map(|(x, y)| x - y).collect();
                assert!(
                    norm_inf(&diff) < 1e-10,
                    "annihilation defect {} at M = {m}, gamma = {gamma}",
                    norm_inf(&diff)
                );
            }
        }
    }

    #[test]
    fn rectangular_blocks_are_diagonal_constant() {
        let o = op(0.0, 1.0, 64, 0.35);
        let a = o.dense();
        let m = 64usize;
        // P block: rows m-1.., cols 0..m-1 of the dense expansion.
        for r in 0..m {
            for c in 0..m - 1 {
                if r + 1 < m && c + 1 < m - 1 {
                    let v = a.get(m - 1 + r, c);
                    let w = a.get(m - 1 + r + 1, c + 1);
                    assert!((v - w).abs() < 1e-15, "P not Toeplitz at ({r},{c})");
                }
            }
        }
        // Q block: rows 0..m-1, cols m-1...
        for r in 0..m - 1 {
            for c in 0..m {
                if r + 1 < m - 1 && c + 1 < m {
                    let v = a.get(r, m - 1 + c);
                    let w = a.get(r + 1, m - 1 + c + 1);
                    assert!((v - w).abs() < 1e-15, "Q not Toeplitz at ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn homogeneous_boundary_gives_zero_vector() {
        let o = op(0.0, 1.0, 8, 0.4);
        assert!(o.boundary_vector(0.0, 0.0).iter().all(|&v| v == 0.0));
        let k = o.boundary_vector(1.0, 0.0);
        assert!((k[0] - o.coeffs().beta[0]).abs() < 1e-15);
    }

    // Independent closed-form oracle: integrate each quadratic basis piece
    // against the kernel by expanding the piece around the collocation point,
    // where the antiderivatives of t^j |t|^{-gamma} are elementary. This
    // never touches the lattice-power formulas used by the implementation.
    mod oracle {
        /// Integral of t^j |t|^{-gamma} over [lo, hi] (signed coordinates).
        fn power_moment(j: usize, lo: f64, hi: f64, gamma: f64) -> f64 {
            let e = j as f64 + 1.0 - gamma;
            let h = |t: f64| t.powf(e) / e;
            if lo >= 0.0 {
                h(hi) - h(lo)
            } else if hi <= 0.0 {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * (h(-lo) - h(-hi))
            } else {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * h(-lo) + h(hi)
            }
        }

        /// Integral over [y0, y1] of (c0 + c1 y + c2 y^2) |x - y|^{-gamma} dy.
        pub fn weighted_quadratic(c: [f64; 3], y0: f64, y1: f64, x: f64, gamma: f64) -> f64 {
            // Shift to powers of (y - x).
            let d0 = c[0] + c[1] * x + c[2] * x * x;
            let d1 = c[1] + 2.0 * c[2] * x;
            let d2 = c[2];
            d0 * power_moment(0, y0 - x, y1 - x, gamma)
                + d1 * power_moment(1, y0 - x, y1 - x, gamma)
                + d2 * power_moment(2, y0 - x, y1 - x, gamma)
        }

        /// Quadratic pieces (coefficients in y) of the basis function centered
        /// at `xi`; integer basis spans two cells, half basis one cell.
        pub fn integer_basis_pieces(xi: f64, h: f64) -> [( [f64; 3], f64, f64); 2] {
            // Left piece (y - (xi-h)) (2y - (2xi - h)) / h^2.
            let l0 = (xi - h) * (2.0 * xi - h) / (h * h);
            let l1 = (-(2.0 * xi - h) - 2.0 * (xi - h)) / (h * h);
            let l2 = 2.0 / (h * h);
            // Right piece ((xi+h) - y) ((2xi + h) - 2y) / h^2.
            let r0 = (xi + h) * (2.0 * xi + h) / (h * h);
            let r1 = (-2.0 * (xi + h) - (2.0 * xi + h)) / (h * h);
            let r2 = 2.0 / (h * h);
            [([l0, l1, l2], xi - h, xi), ([r0, r1, r2], xi, xi + h)]
        }

        pub fn half_basis_piece(xi: f64, h: f64) -> ([f64; 3], f64, f64) {
            // 4 (y - (xi - h/2)) ((xi + h/2) - y) / h^2
            let a = xi - 0.5 * h;
            let b = xi + 0.5 * h;
            let c0 = -4.0 * a * b / (h * h);
            let c1 = 4.0 * (a + b) / (h * h);
            let c2 = -4.0 / (h * h);
            (([c0, c1, c2]), a, b)
        }
    }

    #[test]
    fn every_coefficient_matches_the_piecewise_integral_oracle() {
        for &gamma in &[0.25, 0.6] {
            let grid = CollocationGrid::new(0.0, 1.4, 7).unwrap();
            let kernel = WeaklySingularKernel::new(gamma).unwrap();
            let o = assemble_operator(&grid, &kernel).unwrap();
            let h = grid.h();
            let two_m = 2 * grid.elements();
            for colloc_hu in 1..two_m {
                let x = grid.point(colloc_hu);
                // Interior coefficients.
                for basis_hu in 1..two_m {
                    let xi = grid.point(basis_hu);
                    let expect = if basis_hu % 2 == 0 {
                        oracle::integer_basis_pieces(xi, h)
                            .iter()
                            .map(|(c, y0, y1)| oracle::weighted_quadratic(*c, *y0, *y1, x, gamma))
                            .sum::<f64>()
                    } else {
                        let (c, y0, y1) = oracle::half_basis_piece(xi, h);
                        oracle::weighted_quadratic(c, y0, y1, x, gamma)
                    };
                    let got = o.coeffs().interior_coefficient(colloc_hu, basis_hu);
                    assert!(
                        (got - expect).abs() < 1e-12 * expect.abs().max(1.0),
                        "coefficient mismatch colloc {colloc_hu} basis {basis_hu}: {got} vs {expect}"
                    );
                }
                // Boundary coefficients: phi_0 keeps only its right piece,
                // phi_M only its left piece.
                let pieces = oracle::integer_basis_pieces(grid.a(), h);
                let (c, y0, y1) = pieces[1];
                let left = oracle::weighted_quadratic(c, y0, y1, x, gamma);
                assert!((o.coeffs().boundary_left(colloc_hu) - left).abs() < 1e-12);
                let pieces = oracle::integer_basis_pieces(grid.b(), h);
                let (c, y0, y1) = pieces[0];
                let right = oracle::weighted_quadratic(c, y0, y1, x, gamma);
                assert!((o.coeffs().boundary_right(colloc_hu) - right).abs() < 1e-12);
            }
        }
    }
}
