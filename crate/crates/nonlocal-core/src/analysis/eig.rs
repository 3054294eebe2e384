//! Desk-scale eigensolvers: cyclic Jacobi for symmetric matrices (values and
//! vectors) and a Hessenberg double-shift QR iteration for the full spectrum
//! of a general real matrix (values only).

use super::dense::DenseMatrix;

#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Matching eigenvectors as columns.
    pub vectors: DenseMatrix,
}

/// Cyclic Jacobi rotations. Quadratically convergent; intended for the dense
/// diagnostic sizes, not for large matrices.
pub fn symmetric_eigen(a: &DenseMatrix) -> SymmetricEigen {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    let off = |m: &DenseMatrix| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += m.get(r, c) * m.get(r, c);
                }
            }
        }
        s.sqrt()
    };
    let scale: f64 = (0..n).map(|i| m.get(i, i).abs()).fold(1e-300, f64::max);
    for _sweep in 0..60 {
        if off(&m) <= 1e-14 * scale.max(off(&m) * 0.0 + 1.0) * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    SymmetricEigen { values, vectors }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let mut alpha = 0.0;
        for i in k + 1..n {
            alpha += h.get(i, k) * h.get(i, k);
        }
        alpha = alpha.sqrt();
        if alpha == 0.0 {
            continue;
        }
        if h.get(k + 1, k) > 0.0 {
            alpha = -alpha;
        }
        let mut v = vec![0.0; n];
        v[k + 1] = h.get(k + 1, k) - alpha;
        for i in k + 2..n {
            v[i] = h.get(i, k);
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- (I - 2 v v^T / v^T v) H
        for c in 0..n {
            let mut dot = 0.0;
            for r in k + 1..n {
                dot += v[r] * h.get(r, c);
            }
            let f = 2.0 * dot / vnorm2;
            for r in k + 1..n {
                let val = h.get(r, c) - f * v[r];
                h.set(r, c, val);
            }
        }
        // H <- H (I - 2 v v^T / v^T v)
        for r in 0..n {
            let mut dot = 0.0;
            for c in k + 1..n {
                dot += h.get(r, c) * v[c];
            }
            let f = 2.0 * dot / vnorm2;
            for c in k + 1..n {
                let val = h.get(r, c) - f * v[c];
                h.set(r, c, val);
            }
        }
        for i in k + 2..n {
            h.set(i, k, 0.0);
        }
    }
    h
}

/// Eigenvalues of a general real matrix as `(re, im)` pairs, via Hessenberg
/// reduction and the double-shift QR iteration.
pub fn real_matrix_eigenvalues(a: &DenseMatrix) -> Vec<(f64, f64)> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut h = hessenberg(a);
    let mut eig = Vec::with_capacity(n);

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h.get(i, j).abs();
        }
    }
    if anorm == 0.0 {
        return vec![(0.0, 0.0); n];
    }

    let eps = f64::EPSILON;
    let mut t_shift = 0.0;
    let mut nn = n as isize - 1;
    'outer: while nn >= 0 {
        let mut its = 0;
        loop {
            // Look for a single small subdiagonal element.
            let mut l = nn;
            while l >= 1 {
                let s = h.get((l - 1) as usize, (l - 1) as usize).abs()
                    + h.get(l as usize, l as usize).abs();
                let s = if s == 0.0 { anorm } else { s };
                if h.get(l as usize, (l - 1) as usize).abs() <= eps * s {
                    h.set(l as usize, (l - 1) as usize, 0.0);
                    break;
                }
                l -= 1;
            }
            let x = h.get(nn as usize, nn as usize);
            if l == nn {
                eig.push((x + t_shift, 0.0));
                nn -= 1;
                continue 'outer;
            }
            let y = h.get((nn - 1) as usize, (nn - 1) as usize);
            let w = h.get(nn as usize, (nn - 1) as usize) * h.get((nn - 1) as usize, nn as usize);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x = x + t_shift;
                if q >= 0.0 {
                    let z = p + z.abs().copysign(p);
                    let lam1 = x + z;
                    let lam2 = if z != 0.0 { x - w / z } else { lam1 };
                    eig.push((lam1, 0.0));
                    eig.push((lam2, 0.0));
                } else {
                    eig.push((x + p, z));
                    eig.push((x + p, -z));
                }
                nn -= 2;
                continue 'outer;
            }
            assert!(its < 60, "QR iteration did not converge");
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 || its == 30 || its == 40 || its == 50 {
                // Exceptional shift.
                t_shift += x;
                for i in 0..=nn as usize {
                    let v = h.get(i, i) - x;
                    h.set(i, i, v);
                }
                let s = h.get(nn as usize, (nn - 1) as usize).abs()
                    + h.get((nn - 1) as usize, (nn - 2) as usize).abs();
                y = 0.75 * s;
                x = y;
                w = -0.4375 * s * s;
            }
            its += 1;

            // Form the first column of (H - a I)(H - b I) and find a start row
            // m with small coupling below it.
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
            while m >= l {
                let mu = m as usize;
                let z = h.get(mu, mu);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h.get(mu + 1, mu) + h.get(mu, mu + 1);
                q = h.get(mu + 1, mu + 1) - z - rr - ss;
                r = h.get(mu + 2, mu + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h.get(mu, mu - 1).abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (h.get(mu - 1, mu - 1).abs() + z.abs() + h.get(mu + 1, mu + 1).abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                h.set(i as usize, (i - 2) as usize, 0.0);
            }
            for i in (m + 3)..=nn {
                h.set(i as usize, (i - 3) as usize, 0.0);
            }
            // Double QR sweep over rows l..=nn.
            let mut k = m;
            while k <= nn - 1 {
                let ku = k as usize;
                if k != m {
                    p = h.get(ku, ku - 1);
                    q = h.get(ku + 1, ku - 1);
                    r = if k != nn - 1 { h.get(ku + 2, ku - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    k += 1;
                    continue;
                }
                if k == m {
                    if l != m {
                        let v = -h.get(ku, ku - 1);
                        h.set(ku, ku - 1, v);
                    }
                } else {
                    h.set(ku, ku - 1, -s * x);
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                // Row modification.
                for j in ku..=nn as usize {
                    let mut pp = h.get(ku, j) + q * h.get(ku + 1, j);
                    if k != nn - 1 {
                        pp += r * h.get(ku + 2, j);
                        let v = h.get(ku + 2, j) - pp * z;
                        h.set(ku + 2, j, v);
                    }
                    let v = h.get(ku + 1, j) - pp * y;
                    h.set(ku + 1, j, v);
                    let v = h.get(ku, j) - pp * x;
                    h.set(ku, j, v);
                }
                // Column modification.
                let mmin = if nn < k + 3 { nn as usize } else { (k + 3) as usize };
                for i in l as usize..=mmin {
                    let mut pp = x * h.get(i, ku) + y * h.get(i, ku + 1);
                    if k != nn - 1 {
                        pp += z * h.get(i, ku + 2);
                        let v = h.get(i, ku + 2) - pp * r;
                        h.set(i, ku + 2, v);
                    }
                    let v = h.get(i, ku + 1) - pp * q;
                    h.set(i, ku + 1, v);
                    let v = h.get(i, ku) - pp;
                    h.set(i, ku, v);
                }
                k += 1;
            }
        }
    }
    eig
}
