//! The 2D operator for the additive kernel
//! `((x-xb)^2 + (y-yb)^2)^{-gamma/2}`.
//!
//! The kernel does not separate, so every coefficient is a genuine double
//! integral of a basis product against it. Translation invariance and the
//! reflection symmetry of the interior basis functions reduce the operator to
//! four offset tables (one per combination of integer/half basis type in each
//! direction); the four global blocks are two-level Toeplitz structures over
//! those tables and multiply through the BCCB machinery. Boundary data uses
//! dedicated edge tensors because the one-sided edge basis breaks the
//! reflection symmetry in the normal direction.

use super::grid2::Grid2D;
use super::quadrature::{fan_integral_rect, tensor_gl_rect};
use crate::analysis::DenseMatrix;
use crate::error::CoreError;
use crate::pqc::WeaklySingularKernel;
use crate::structured::{BtcbFamily, InnerBlockSymbols, LinearOperator};

#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Tensor Gauss-Legendre order per direction for far cells.
    pub far_order: usize,
    /// Angular nodes per triangle in the singular/near fan.
    pub angular_order: usize,
    /// Radial Gauss-Jacobi nodes; 4 is exact for the quartic radial profiles
    /// of basis products.
    pub radial_order: usize,
    /// Chebyshev distance (in cells) up to which cells use the fan.
    pub near_cells: f64,
    /// Worker threads for the embarrassingly parallel table assembly.
    pub threads: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { far_order: 8, angular_order: 20, radial_order: 4, near_cells: 2.0, threads: 1 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.far_order < 4 {
            return Err(CoreError::QuadratureFailure {
                detail: format!("far tensor order {} below the minimum of 4", self.far_order),
            });
        }
        if self.angular_order < 4 || self.radial_order < 3 {
            return Err(CoreError::QuadratureFailure {
                detail: "fan orders too low (need angular >= 4, radial >= 3)".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BasisKind {
    /// Interior integer-node basis: two quadratic pieces over two cells.
    Int,
    /// Half-node bump: one piece over one cell.
    Half,
    /// One-sided edge basis keeping only the piece that points into the
    /// domain (the mirror case is handled by reflecting offsets).
    BndPlus,
}

#[derive(Debug, Clone, Copy)]
enum PieceKind {
    Minus,
    Plus,
    Bump,
}

#[inline]
fn piece_eval(kind: PieceKind, node: f64, h: f64, x: f64) -> f64 {
    let u = (x - node) / h;
    match kind {
        PieceKind::Minus => (u + 1.0) * (2.0 * u + 1.0),
        PieceKind::Plus => (1.0 - u) * (1.0 - 2.0 * u),
        PieceKind::Bump => 1.0 - 4.0 * u * u,
    }
}

fn pieces(kind: BasisKind, node: f64, h: f64) -> Vec<(f64, f64, PieceKind)> {
    match kind {
        BasisKind::Int => vec![
            (node - h, node, PieceKind::Minus),
            (node, node + h, PieceKind::Plus),
        ],
        BasisKind::Half => vec![(node - 0.5 * h, node + 0.5 * h, PieceKind::Bump)],
        BasisKind::BndPlus => vec![(node, node + h, PieceKind::Plus)],
    }
}

/// Distance from the origin to an interval.
#[inline]
fn interval_distance(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        lo
    } else if hi < 0.0 {
        -hi
    } else {
        0.0
    }
}

/// One basis-product coefficient with the collocation point at the origin and
/// the two basis nodes at signed relative positions.
fn coefficient(
    gamma: f64,
    quad: &QuadratureSpec,
    hx: f64,
    hy: f64,
    xkind: BasisKind,
    x_node: f64,
    ykind: BasisKind,
    y_node: f64,
) -> f64 {
    let mut total = 0.0;
    for &(xlo, xhi, xp) in &pieces(xkind, x_node, hx) {
        for &(ylo, yhi, yp) in &pieces(ykind, y_node, hy) {
            let rect = (xlo, xhi, ylo, yhi);
            let w = |x: f64, y: f64| piece_eval(xp, x_node, hx, x) * piece_eval(yp, y_node, hy, y);
            let dist = (interval_distance(xlo, xhi) / hx)
                .max(interval_distance(ylo, yhi) / hy);
            total += if dist <= quad.near_cells + 1e-12 {
                fan_integral_rect(rect, (0.0, 0.0), gamma, &w, quad.angular_order, quad.radial_order)
            } else {
                tensor_gl_rect(rect, (0.0, 0.0), gamma, &w, quad.far_order)
            };
        }
    }
    total
}

/// Rectangular table indexed by two offsets.
#[derive(Debug, Clone)]
struct Table2 {
    ny: usize,
    v: Vec<f64>,
}

impl Table2 {
    fn get(&self, ox: usize, oy: usize) -> f64 {
        debug_assert!(oy < self.ny, "offset {oy} outside table width {}", self.ny);
        self.v[ox * self.ny + oy]
    }
}

fn par_rows<T: Send>(rows: usize, threads: usize, f: impl Fn(usize) -> Vec<T> + Sync) -> Vec<Vec<T>> {
    if threads <= 1 || rows <= 1 {
        return (0..rows).map(f).collect();
    }
    let threads = threads.min(rows);
    let mut out: Vec<Option<Vec<T>>> = (0..rows).map(|_| None).collect();
    let chunks: Vec<(usize, Vec<T>)> = std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    let mut local = Vec::new();
                    let mut r = t;
                    while r < rows {
                        local.push((r, f(r)));
                        r += threads;
                    }
                    local
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    for (r, v) in chunks {
        out[r] = Some(v);
    }
    out.into_iter().map(|o| o.unwrap()).collect()
}

fn build_table(
    gamma: f64,
    quad: &QuadratureSpec,
    hx: f64,
    hy: f64,
    xkind: BasisKind,
    ykind: BasisKind,
    nx: usize,
    ny: usize,
) -> Result<Table2, CoreError> {
    let rows = par_rows(nx, quad.threads, |ox| {
        (0..ny)
            .map(|oy| {
                coefficient(
                    gamma,
                    quad,
                    hx,
                    hy,
                    xkind,
                    0.5 * hx * ox as f64,
                    ykind,
                    0.5 * hy * oy as f64,
                )
            })
            .collect::<Vec<f64>>()
    });
    let v: Vec<f64> = rows.into_iter().flatten().collect();
    for (idx, val) in v.iter().enumerate() {
        if !val.is_finite() {
            return Err(CoreError::QuadratureFailure {
                detail: format!(
                    "non-finite coefficient at offsets ({}, {})",
                    idx / ny,
                    idx % ny
                ),
            });
        }
    }
    Ok(Table2 { ny, v })
}

/// Interior coefficient tables for the four basis-type pairs; offsets are in
/// half units relative to the collocation point.
#[derive(Debug, Clone)]
struct InteriorTables {
    int_int: Table2,
    int_half: Table2,
    half_int: Table2,
    half_half: Table2,
}

/// Edge tensor for one pair of opposite edges: the one-sided basis sits on
/// the edge at perpendicular half-unit distance `d = 1..2M-1` from the
/// collocation point; parallel-direction basis types Int/Half index by their
/// absolute offset, the corner basis (only on x-edges) by the signed one.
#[derive(Debug, Clone)]
struct EdgeTensor {
    int_: Table2,
    half: Table2,
    corner: Option<Table2>,
}

/// The assembled additive operator `A = D - G` with `G` in four BCCB-backed
/// families.
#[derive(Debug, Clone)]
pub struct AdditiveOperator2D {
    grid: Grid2D,
    kernel: WeaklySingularKernel,
    quad: QuadratureSpec,
    diag: Vec<f64>,
    fam_m: BtcbFamily,
    fam_q: BtcbFamily,
    fam_p: BtcbFamily,
    fam_n: BtcbFamily,
    tables: InteriorTables,
    edge_x: EdgeTensor,
    edge_y: EdgeTensor,
}

pub fn assemble_additive(
    grid: &Grid2D,
    kernel: &WeaklySingularKernel,
    quad: &QuadratureSpec,
) -> Result<AdditiveOperator2D, CoreError> {
    quad.validate()?;
    let gamma = kernel.gamma();
    let mx = grid.gx.elements();
    let my = grid.gy.elements();
    let hx = grid.gx.h();
    let hy = grid.gy.h();

    let tables = InteriorTables {
        int_int: build_table(gamma, quad, hx, hy, BasisKind::Int, BasisKind::Int, 2 * mx - 2, 2 * my - 2)?,
        int_half: build_table(gamma, quad, hx, hy, BasisKind::Int, BasisKind::Half, 2 * mx - 2, 2 * my - 1)?,
        half_int: build_table(gamma, quad, hx, hy, BasisKind::Half, BasisKind::Int, 2 * mx - 1, 2 * my - 2)?,
        half_half: build_table(gamma, quad, hx, hy, BasisKind::Half, BasisKind::Half, 2 * mx - 1, 2 * my - 1)?,
    };

    // Edge tensors. The one-sided basis node sits at the edge, a negative
    // relative coordinate; offsets run over the perpendicular distance.
    let edge_x = {
        let build = |ykind: BasisKind, ny: usize, corner: bool| -> Result<Table2, CoreError> {
            let rows = par_rows(2 * mx - 1, quad.threads, |d0| {
                let d = d0 + 1;
                (0..ny)
                    .map(|oy0| {
                        // Interior y-basis types are reflection symmetric, so
                        // the absolute offset oy0 is placed above the point;
                        // the corner basis is one-sided and sits below it at
                        // distance oy0 + 1.
                        let y_node = if corner {
                            -0.5 * hy * (oy0 + 1) as f64
                        } else {
                            0.5 * hy * oy0 as f64
                        };
                        coefficient(
                            gamma,
                            quad,
                            hx,
                            hy,
                            BasisKind::BndPlus,
                            -0.5 * hx * d as f64,
                            ykind,
                            y_node,
                        )
                    })
                    .collect::<Vec<f64>>()
            });
            Ok(Table2 { ny, v: rows.into_iter().flatten().collect() })
        };
        EdgeTensor {
            int_: build(BasisKind::Int, 2 * my - 2, false)?,
            half: build(BasisKind::Half, 2 * my - 1, false)?,
            corner: Some(build(BasisKind::BndPlus, 2 * my - 1, true)?),
        }
    };
    let edge_y = {
        let build = |xkind: BasisKind, nx: usize| -> Result<Table2, CoreError> {
            let rows = par_rows(2 * my - 1, quad.threads, |d0| {
                let d = d0 + 1;
                (0..nx)
                    .map(|ox| {
                        coefficient(
                            gamma,
                            quad,
                            hx,
                            hy,
                            xkind,
                            0.5 * hx * ox as f64,
                            BasisKind::BndPlus,
                            -0.5 * hy * d as f64,
                        )
                    })
                    .collect::<Vec<f64>>()
            });
            Ok(Table2 { ny: nx, v: rows.into_iter().flatten().collect() })
        };
        EdgeTensor {
            int_: build(BasisKind::Int, 2 * mx - 2)?,
            half: build(BasisKind::Half, 2 * mx - 1)?,
            corner: None,
        }
    };

    // Diagonal through a per-cell kernel-integral table: D depends on the
    // whole domain, but each cell contribution only on its offset.
    let jx = 4 * mx - 2;
    let jy = 4 * my - 2;
    let j_rows = par_rows(jx, quad.threads, |ix| {
        let dx2 = ix as isize - (2 * mx as isize - 1);
        (0..jy)
            .map(|iy| {
                let dy2 = iy as isize - (2 * my as isize - 1);
                let rect = (
                    0.5 * hx * dx2 as f64,
                    0.5 * hx * dx2 as f64 + hx,
                    0.5 * hy * dy2 as f64,
                    0.5 * hy * dy2 as f64 + hy,
                );
                let dist = (interval_distance(rect.0, rect.1) / hx)
                    .max(interval_distance(rect.2, rect.3) / hy);
                if dist <= quad.near_cells + 1e-12 {
                    fan_integral_rect(
                        rect,
                        (0.0, 0.0),
                        gamma,
                        &|_, _| 1.0,
                        quad.angular_order,
                        quad.radial_order,
                    )
                } else {
                    tensor_gl_rect(rect, (0.0, 0.0), gamma, &|_, _| 1.0, quad.far_order)
                }
            })
            .collect::<Vec<f64>>()
    });
    let j_table: Vec<f64> = j_rows.into_iter().flatten().collect();
    let j_at = |dx2: isize, dy2: isize| -> f64 {
        let ix = (dx2 + 2 * mx as isize - 1) as usize;
        let iy = (dy2 + 2 * my as isize - 1) as usize;
        j_table[ix * jy + iy]
    };
    let nx = grid.nx();
    let ny = grid.ny();
    let mut diag = vec![0.0; nx * ny];
    for i in 0..nx {
        let i_hu = grid.gx.half_units_of(i) as isize;
        for j in 0..ny {
            let j_hu = grid.gy.half_units_of(j) as isize;
            let mut acc = 0.0;
            for cx in 0..mx as isize {
                for cy in 0..my as isize {
                    acc += j_at(2 * cx - i_hu, 2 * cy - j_hu);
                }
            }
            diag[i * ny + j] = acc;
        }
    }

    // The four families assembled from the interior tables.
    let sym_from = |xtab_int: &Table2, xtab_half: &Table2, ox: usize| -> InnerBlockSymbols {
        InnerBlockSymbols {
            t_m: (0..my - 1).map(|j| xtab_int.get(ox, 2 * j)).collect(),
            t_q: (0..my - 1).map(|j| xtab_half.get(ox, 2 * j + 1)).collect(),
            t_p: (0..my - 1).map(|j| xtab_int.get(ox, 2 * j + 1)).collect(),
            t_n: (0..my).map(|j| xtab_half.get(ox, 2 * j)).collect(),
        }
    };
    // A common outer embedding size lets the apply share forward transforms
    // across the four families and add spectra before back-transforming.
    let min_outer = 2 * mx - 1;
    let fam_m = BtcbFamily::with_min_outer(mx - 1, mx - 1, min_outer, |delta| {
        sym_from(&tables.int_int, &tables.int_half, 2 * delta.unsigned_abs())
    })?;
    let fam_q = BtcbFamily::with_min_outer(mx - 1, mx, min_outer, |delta| {
        let k = if delta >= 0 { delta as usize } else { (-delta - 1) as usize };
        sym_from(&tables.half_int, &tables.half_half, 2 * k + 1)
    })?;
    let fam_p = BtcbFamily::with_min_outer(mx, mx - 1, min_outer, |delta| {
        let k = if delta >= 1 { (delta - 1) as usize } else { (-delta) as usize };
        sym_from(&tables.int_int, &tables.int_half, 2 * k + 1)
    })?;
    let fam_n = BtcbFamily::with_min_outer(mx, mx, min_outer, |delta| {
        sym_from(&tables.half_int, &tables.half_half, 2 * delta.unsigned_abs())
    })?;

    Ok(AdditiveOperator2D {
        grid: *grid,
        kernel: *kernel,
        quad: *quad,
        diag,
        fam_m,
        fam_q,
        fam_p,
        fam_n,
        tables,
        edge_x,
        edge_y,
    })
}

impl AdditiveOperator2D {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn kernel(&self) -> &WeaklySingularKernel {
        &self.kernel
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `2 (b-a) (d-c)^{1-gamma} / (1-gamma)`.
    pub fn diagonal_bound(&self) -> f64 {
        let g = self.kernel.gamma();
        let lx = self.grid.gx.b() - self.grid.gx.a();
        let ly = self.grid.gy.b() - self.grid.gy.a();
        2.0 * lx * ly.powf(1.0 - g) / (1.0 - g)
    }

    /// Off-diagonal coefficient of `G` between the collocation point
    /// `(i_hu, j_hu)` and the interior basis at `(l_hu, r_hu)` (half units).
    pub fn interior_coefficient(&self, i_hu: usize, j_hu: usize, l_hu: usize, r_hu: usize) -> f64 {
        let ox = i_hu.abs_diff(l_hu);
        let oy = j_hu.abs_diff(r_hu);
        match (l_hu % 2, r_hu % 2) {
            (0, 0) => self.tables.int_int.get(ox, oy),
            (0, 1) => self.tables.int_half.get(ox, oy),
            (1, 0) => self.tables.half_int.get(ox, oy),
            (1, 1) => self.tables.half_half.get(ox, oy),
            _ => unreachable!(),
        }
    }

    /// `G u` through the four BCCB families. The families share transform
    /// dimensions, so the two input grids are transformed once and the
    /// per-family spectra are combined before the two back-transforms.
    pub fn apply_g(&self, u: &[f64]) -> Result<Vec<f64>, CoreError> {
        use crate::structured::{fft2, Complex};
        let n = self.grid.unknowns();
        if u.len() != n {
            return Err(CoreError::DimensionMismatch { expected: n, got: u.len() });
        }
        let sl = self.grid.ny();
        let mx = self.grid.gx.elements();
        let split = (mx - 1) * sl;
        let (u_l, u_r) = u.split_at(split);

        let (m_out, m_in) = self.fam_m.transform_dims();
        debug_assert_eq!((m_out, m_in), self.fam_n.transform_dims());
        let len = m_out * m_in;
        let mut grid_l = vec![Complex::ZERO; len];
        self.fam_m.fill_input_grid(u_l, &mut grid_l);
        fft2(&mut grid_l, m_out, m_in, false);
        let mut grid_r = vec![Complex::ZERO; len];
        self.fam_n.fill_input_grid(u_r, &mut grid_r);
        fft2(&mut grid_r, m_out, m_in, false);

        let (sm, sq) = (self.fam_m.spectrum(), self.fam_q.spectrum());
        let (sp, sn) = (self.fam_p.spectrum(), self.fam_n.spectrum());
        let mut top = vec![Complex::ZERO; len];
        let mut bottom = vec![Complex::ZERO; len];
        for i in 0..len {
            top[i] = sm[i] * grid_l[i] + sq[i] * grid_r[i];
            bottom[i] = sp[i] * grid_l[i] + sn[i] * grid_r[i];
        }
        fft2(&mut top, m_out, m_in, true);
        fft2(&mut bottom, m_out, m_in, true);

        let gm_gq = self.fam_m.extract_output_grid(&top);
        let gp_gn = self.fam_p.extract_output_grid(&bottom);
        let mut out = gm_gq;
        out.extend_from_slice(&gp_gn);
        debug_assert_eq!(out.len(), n);
        Ok(out)
    }

    /// Boundary contribution for a Dirichlet trace on the four edges.
    pub fn boundary_vector(&self, trace: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
        let gx = &self.grid.gx;
        let gy = &self.grid.gy;
        let (a, b) = (gx.a(), gx.b());
        let (c, d) = (gy.a(), gy.b());
        let two_mx = 2 * gx.elements();
        let two_my = 2 * gy.elements();
        let nx = self.grid.nx();
        let ny = self.grid.ny();

        let x_edge_val = |dist: usize, j_hu: usize, r_hu: usize| -> f64 {
            if r_hu == 0 {
                self.edge_x.corner.as_ref().unwrap().get(dist - 1, j_hu - 1)
            } else if r_hu == two_my {
                self.edge_x.corner.as_ref().unwrap().get(dist - 1, two_my - j_hu - 1)
            } else if r_hu % 2 == 0 {
                self.edge_x.int_.get(dist - 1, j_hu.abs_diff(r_hu))
            } else {
                self.edge_x.half.get(dist - 1, j_hu.abs_diff(r_hu))
            }
        };
        let y_edge_val = |dist: usize, i_hu: usize, l_hu: usize| -> f64 {
            if l_hu % 2 == 0 {
                self.edge_y.int_.get(dist - 1, i_hu.abs_diff(l_hu))
            } else {
                self.edge_y.half.get(dist - 1, i_hu.abs_diff(l_hu))
            }
        };

        let mut out = vec![0.0; nx * ny];
        for i in 0..nx {
            let i_hu = gx.half_units_of(i);
            for j in 0..ny {
                let j_hu = gy.half_units_of(j);
                let mut acc = 0.0;
                for r_hu in 0..=two_my {
                    let yv = gy.point(r_hu);
                    acc += x_edge_val(i_hu, j_hu, r_hu) * trace(a, yv);
                    acc += x_edge_val(two_mx - i_hu, j_hu, r_hu) * trace(b, yv);
                }
                for l_hu in 1..two_mx {
                    let xv = gx.point(l_hu);
                    acc += y_edge_val(j_hu, i_hu, l_hu) * trace(xv, c);
                    acc += y_edge_val(two_my - j_hu, i_hu, l_hu) * trace(xv, d);
                }
                out[i * ny + j] = acc;
            }
        }
        out
    }

    /// Dense expansion of `G`; oracles and diagnostics only.
    pub fn dense_g(&self) -> DenseMatrix {
        let n = self.grid.unknowns();
        let ny = self.grid.ny();
        let gx = &self.grid.gx;
        let gy = &self.grid.gy;
        DenseMatrix::from_fn(n, n, |row, col| {
            let i_hu = gx.half_units_of(row / ny);
            let j_hu = gy.half_units_of(row % ny);
            let l_hu = gx.half_units_of(col / ny);
            let r_hu = gy.half_units_of(col % ny);
            self.interior_coefficient(i_hu, j_hu, l_hu, r_hu)
        })
    }

    /// Dense expansion of `A = D - G`.
    pub fn dense(&self) -> DenseMatrix {
        let mut m = self.dense_g();
        let n = m.rows();
        for r in 0..n {
            for c in 0..n {
                let v = if r == c { self.diag[r] - m.get(r, c) } else { -m.get(r, c) };
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn storage_len(&self) -> usize {
        self.diag.len()
            + self.fam_m.storage_len()
            + self.fam_q.storage_len()
            + self.fam_p.storage_len()
            + self.fam_n.storage_len()
            + self.tables.int_int.v.len()
            + self.tables.int_half.v.len()
            + self.tables.half_int.v.len()
            + self.tables.half_half.v.len()
    }
}

impl LinearOperator for AdditiveOperator2D {
    fn dim(&self) -> usize {
        self.grid.unknowns()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        let mut g = self.apply_g(x)?;
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = self.diag[i] * x[i] - *gi;
        }
        Ok(g)
    }
}
