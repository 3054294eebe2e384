//! Quadrature for the additive kernel `((x-xb)^2 + (y-yb)^2)^{-gamma/2}`.
//!
//! Far cells use plain tensor Gauss-Legendre. Cells at or near the
//! collocation point use a signed triangle fan around the point: the cell is
//! the signed union of the four triangles spanned by the point and the cell
//! corners, each triangle is parametrized radially from the point, and the
//! radial factor `r^{1-gamma} dr` is handled by a Gauss-Jacobi rule with
//! exactly that weight. The radial integrand of a piecewise quadratic basis
//! product is a quartic polynomial, so a four-point Jacobi rule integrates it
//! exactly and the angular direction is analytic; the singularity never
//! enters the nodes.

use crate::analysis::symmetric_eigen;
use crate::analysis::DenseMatrix;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| {
            assert!(n >= 1);
            let mut nodes = vec![0.0; n];
            let mut weights = vec![0.0; n];
            let m = n.div_ceil(2);
            for i in 0..m {
                // Newton iteration from the Chebyshev-like initial guess.
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    if n == 1 {
                        p1 = x;
                    }
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0)
                            / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    // p1 = P_n(x), p0 = P_{n-1}(x).
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-15 {
                        break;
                    }
                }
                nodes[i] = -x;
                nodes[n - 1 - i] = x;
                let w = 2.0 / ((1.0 - x * x) * dp * dp);
                weights[i] = w;
                weights[n - 1 - i] = w;
            }
            if n % 2 == 1 {
                nodes[n / 2] = 0.0;
            }
            Arc::new((nodes, weights))
        })
        .clone()
}

/// Rule for `∫_0^1 t^beta f(t) dt` with `beta > -1`: nodes in (0, 1) and
/// weights with the singular factor absorbed. Built by Golub-Welsch on the
/// Jacobi recurrence, cached per `(n, beta)`.
pub fn gauss_jacobi_unit(n: usize, beta: f64) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<(Vec<f64>, Vec<f64>)>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((n, beta.to_bits()))
        .or_insert_with(|| {
            assert!(n >= 1 && beta > -1.0);
            // Jacobi matrix for weight (1+x)^beta on [-1, 1] (alpha = 0).
            let mut j = DenseMatrix::zeros(n, n);
            for k in 0..n {
                let kf = k as f64;
                let diag = if k == 0 {
                    beta / (beta + 2.0)
                } else {
                    beta * beta / ((2.0 * kf + beta) * (2.0 * kf + beta + 2.0))
                };
                j.set(k, k, diag);
                if k + 1 < n {
                    let k1 = kf + 1.0;
                    let b = if k == 0 {
                        4.0 * (1.0 + beta) / ((2.0 + beta) * (2.0 + beta) * (3.0 + beta))
                    } else {
                        4.0 * k1 * k1 * (k1 + beta) * (k1 + beta)
                            / ((2.0 * k1 + beta)
                                * (2.0 * k1 + beta)
                                * (2.0 * k1 + beta + 1.0)
                                * (2.0 * k1 + beta - 1.0))
                    };
                    let off = b.sqrt();
                    j.set(k, k + 1, off);
                    j.set(k + 1, k, off);
                }
            }
            let eig = symmetric_eigen(&j);
            let mu0 = 2.0f64.powf(beta + 1.0) / (beta + 1.0);
            let scale = 2.0f64.powf(-(beta + 1.0));
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for i in 0..n {
                nodes.push(0.5 * (1.0 + eig.values[i]));
                let v0 = eig.vectors.get(0, i);
                weights.push(mu0 * v0 * v0 * scale);
            }
            Arc::new((nodes, weights))
        })
        .clone()
}

/// `∫∫_rect w(p) |p - z|^{-gamma} dp` by the signed triangle fan around `z`.
/// Exact in the radial direction whenever `w` restricted to rays is a
/// polynomial of degree `< 2 * radial_order`; the angular direction uses
/// Gauss-Legendre panels graded toward the point of the opposite edge closest
/// to `z`, so thin triangles (a far-away singularity very close to one edge
/// line) keep full accuracy.
pub fn fan_integral_rect(
    rect: (f64, f64, f64, f64),
    z: (f64, f64),
    gamma: f64,
    w: &dyn Fn(f64, f64) -> f64,
    angular_order: usize,
    radial_order: usize,
) -> f64 {
    let (x0, x1, y0, y1) = rect;
    let corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)];
    let gl = gauss_legendre(angular_order);
    let gj = gauss_jacobi_unit(radial_order, 1.0 - gamma);
    let scale = ((x1 - x0).abs() + (y1 - y0).abs()).max(1e-300);
    let mut total = 0.0;
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let v1 = (a.0 - z.0, a.1 - z.1);
        let v2 = (b.0 - z.0, b.1 - z.1);
        let cross = v1.0 * v2.1 - v1.1 * v2.0;
        if cross.abs() < 1e-14 * scale * scale {
            continue;
        }
        // |d(s)|^2 is a quadratic in s; panels grade dyadically from its
        // minimizer outwards once the edge spans a wide distance ratio.
        let e = (v2.0 - v1.0, v2.1 - v1.1);
        let aa = e.0 * e.0 + e.1 * e.1;
        let bb = 2.0 * (v1.0 * e.0 + v1.1 * e.1);
        let r_at = |s: f64| {
            let d = (v1.0 + s * e.0, v1.1 + s * e.1);
            d.0.hypot(d.1)
        };
        let s_min = if aa > 0.0 { (-bb / (2.0 * aa)).clamp(0.0, 1.0) } else { 0.0 };
        let r_min = r_at(s_min).max(1e-300);
        let r_max = r_at(0.0).max(r_at(1.0));
        let mut breaks = vec![0.0, 1.0];
        if r_max > 4.0 * r_min {
            let levels = (r_max / r_min).log2().ceil() as usize;
            for side in [0.0f64, 1.0] {
                let span = side - s_min;
                if span.abs() > 1e-14 {
                    for k in 1..=levels {
                        breaks.push(s_min + span * 0.5f64.powi(k as i32));
                    }
                }
            }
            breaks.push(s_min);
            breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
            breaks.dedup_by(|p, q| (*p - *q).abs() < 1e-15);
        }

        let mut tri = 0.0;
        for panel in breaks.windows(2) {
            let (lo, hi) = (panel[0], panel[1]);
            let half = 0.5 * (hi - lo);
            if half <= 0.0 {
                continue;
            }
            let mid = 0.5 * (lo + hi);
            for (xs, ws) in gl.0.iter().zip(&gl.1) {
                let s = mid + half * xs;
                let ds = half * ws;
                let d = (v1.0 + s * e.0, v1.1 + s * e.1);
                let r = d.0.hypot(d.1);
                let mut inner = 0.0;
                for (t, wt) in gj.0.iter().zip(&gj.1) {
                    inner += wt * w(z.0 + t * d.0, z.1 + t * d.1);
                }
                tri += ds * r.powf(-gamma) * inner;
            }
        }
        total += cross * tri;
    }
    total
}

/// Plain tensor Gauss-Legendre of `w(p) |p - z|^{-gamma}` over a rectangle.
pub fn tensor_gl_rect(
    rect: (f64, f64, f64, f64),
    z: (f64, f64),
    gamma: f64,
    w: &dyn Fn(f64, f64) -> f64,
    order: usize,
) -> f64 {
    let (x0, x1, y0, y1) = rect;
    let gl = gauss_legendre(order);
    let (cx, hx) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
    let (cy, hy) = (0.5 * (y0 + y1), 0.5 * (y1 - y0));
    let mut total = 0.0;
    for (xi, wi) in gl.0.iter().zip(&gl.1) {
        let px = cx + hx * xi;
        for (yj, wj) in gl.0.iter().zip(&gl.1) {
            let py = cy + hy * yj;
            let dx = px - z.0;
            let dy = py - z.1;
            total += wi * wj * w(px, py) * (dx * dx + dy * dy).powf(-0.5 * gamma);
        }
    }
    total * hx * hy
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for &n in &[1usize, 2, 5, 8, 20] {
            let gl = gauss_legendre(n);
            for k in 0..2 * n {
                let got: f64 =
                    gl.0.iter().zip(&gl.1).map(|(x, w)| w * x.powi(k as i32)).sum();
                let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                assert!((got - want).abs() < 1e-13, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn jacobi_rule_hits_the_singular_moments() {
        for &beta in &[0.2, 0.5, 0.9, -0.4] {
            for &n in &[1usize, 3, 4, 8] {
                let gj = gauss_jacobi_unit(n, beta);
                for k in 0..2 * n {
                    let got: f64 =
                        gj.0.iter().zip(&gj.1).map(|(t, w)| w * t.powi(k as i32)).sum();
                    let want = 1.0 / (beta + k as f64 + 1.0);
                    assert!(
                        (got - want).abs() < 1e-12 * want,
                        "beta = {beta}, n = {n}, k = {k}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn jacobi_with_zero_weight_reduces_to_legendre_values() {
        let gj = gauss_jacobi_unit(10, 0.0);
        let got: f64 = gj.0.iter().zip(&gj.1).map(|(t, w)| w * (3.0 * t).sin()).sum();
        let want = (1.0 - (3.0f64).cos()) / 3.0;
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn fan_matches_tensor_rule_on_a_far_rectangle() {
        // No singularity in or near the cell: both rules are accurate.
        let rect = (2.0, 2.5, 1.0, 1.75);
        let z = (0.0, 0.0);
        let w = |x: f64, y: f64| 1.0 + x * y + y * y;
        for &gamma in &[0.2, 0.8] {
            let fan = fan_integral_rect(rect, z, gamma, &w, 24, 8);
            let tg = tensor_gl_rect(rect, z, gamma, &w, 16);
            assert!((fan - tg).abs() < 1e-12 * tg.abs(), "{fan} vs {tg}");
        }
    }

    #[test]
    fn fan_handles_the_singular_cell_exactly() {
        // z at the cell center with w = 1: in polar coordinates the integral
        // over the square [-1,1]^2 is 8 ∫_0^{pi/4} (sec th)^{2-g} dth / (2-g),
        // evaluated here by a fine angular sum for reference.
        let gamma = 0.5f64;
        let rect = (-1.0, 1.0, -1.0, 1.0);
        let got = fan_integral_rect(rect, (0.0, 0.0), gamma, &|_, _| 1.0, 40, 4);
        let n = 20000;
        let mut want = 0.0;
        let h = std::f64::consts::FRAC_PI_4 / n as f64;
        for i in 0..n {
            let th = (i as f64 + 0.5) * h;
            want += (1.0 / th.cos()).powf(2.0 - gamma) * h;
        }
        want *= 8.0 / (2.0 - gamma);
        assert!((got - want).abs() < 1e-7 * want, "{got} vs {want}");
    }

    #[test]
    fn fan_is_exact_for_vanishing_weight_at_singular_corner() {
        // z at a cell corner, w a quartic that vanishes at z: compare against
        // a dyadically refined tensor rule.
        let gamma = 0.7;
        let rect = (0.0, 1.0, 0.0, 1.0);
        let z = (0.0, 0.0);
        let w = |x: f64, y: f64| x * x * (1.0 + y) + y * y;
        let fan = fan_integral_rect(rect, z, gamma, &w, 32, 4);
        // Reference: split [0,1]^2 into L-shaped shells shrinking to the
        // corner; each shell is far from the singularity.
        let mut want = 0.0;
        let mut lo = 1.0;
        for _ in 0..40 {
            let hi = lo;
            lo *= 0.5;
            // Shell = [lo,hi]x[0,hi] plus [0,lo]x[lo,hi].
            want += tensor_gl_rect((lo, hi, 0.0, hi), z, gamma, &w, 16);
            want += tensor_gl_rect((0.0, lo, lo, hi), z, gamma, &w, 16);
        }
        assert!((fan - want).abs() < 1e-9 * want.abs().max(1.0), "{fan} vs {want}");
    }
}
