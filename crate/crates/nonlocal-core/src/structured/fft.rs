//! Iterative radix-2 complex FFT with per-size cached plans.
//!
//! Plans hold the bit-reversal table and precomputed twiddles for one
//! power-of-two size and are shared process-wide behind a mutex-guarded map,
//! so repeated transforms of the same size never recompute trigonometry.
//! Transforms are deterministic: identical input bits give identical output
//! bits for a fixed size.

use super::complex::Complex;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug)]
pub struct FftPlan {
    n: usize,
    /// Twiddles `e^{-2 pi i j / n}` for `j < n/2` (forward direction).
    twiddles: Vec<Complex>,
    bitrev: Vec<u32>,
}

fn plan_cache() -> &'static Mutex<HashMap<usize, Arc<FftPlan>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<FftPlan>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

impl FftPlan {
    /// Plan for size `n`, which must be a power of two.
    pub fn get(n: usize) -> Arc<FftPlan> {
        assert!(n.is_power_of_two(), "FFT size {n} is not a power of two");
        let mut cache = plan_cache().lock().unwrap();
        cache
            .entry(n)
            .or_insert_with(|| {
                let half = n / 2;
                let twiddles = (0..half)
                    .map(|j| Complex::cis(-2.0 * std::f64::consts::PI * j as f64 / n as f64))
                    .collect();
                let bits = n.trailing_zeros();
                let bitrev = (0..n as u32)
                    .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
                    .collect();
                Arc::new(FftPlan { n, twiddles, bitrev })
            })
            .clone()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    fn transform(&self, buf: &mut [Complex], inverse: bool) {
        let n = self.n;
        assert_eq!(buf.len(), n);
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
        if inverse {
            let s = 1.0 / n as f64;
            for v in buf.iter_mut() {
                *v = v.scale(s);
            }
        }
    }

    pub fn forward(&self, buf: &mut [Complex]) {
        self.transform(buf, false);
    }

    pub fn inverse(&self, buf: &mut [Complex]) {
        self.transform(buf, true);
    }
}

/// Forward DFT of a real vector zero-padded to `n` (power of two); returns the
/// full complex spectrum.
pub fn real_fft_padded(x: &[f64], n: usize) -> Vec<Complex> {
    let plan = FftPlan::get(n);
    let mut buf = vec![Complex::ZERO; n];
    for (b, &v) in buf.iter_mut().zip(x) {
        *b = Complex::real(v);
    }
    plan.forward(&mut buf);
    buf
}

/// In-place 2D transform of a row-major `rows x cols` grid; both dimensions
/// must be powers of two.
pub fn fft2(data: &mut [Complex], rows: usize, cols: usize, inverse: bool) {
    assert_eq!(data.len(), rows * cols);
    let row_plan = FftPlan::get(cols);
    for r in 0..rows {
        let row = &mut data[r * cols..(r + 1) * cols];
        if inverse {
            row_plan.inverse(row);
        } else {
            row_plan.forward(row);
        }
    }
    let col_plan = FftPlan::get(rows);
    let mut scratch = vec![Complex::ZERO; rows];
    for c in 0..cols {
        for r in 0..rows {
            scratch[r] = data[r * cols + c];
        }
        if inverse {
            col_plan.inverse(&mut scratch);
        } else {
            col_plan.forward(&mut scratch);
        }
        for r in 0..rows {
            data[r * cols + c] = scratch[r];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::SplitMix64;

    #[test]
    fn matches_direct_dft_on_small_sizes() {
        let mut rng = SplitMix64::new(5);
        for &n in &[1usize, 2, 4, 8, 16] {
            let x: Vec<Complex> =
                (0..n).map(|_| Complex::new(rng.next_sym(), rng.next_sym())).collect();
            let mut fast = x.clone();
            FftPlan::get(n).forward(&mut fast);
            for k in 0..n {
                let mut acc = Complex::ZERO;
                for (j, v) in x.iter().enumerate() {
                    acc += *v
                        * Complex::cis(-2.0 * std::f64::consts::PI * (j * k % n) as f64 / n as f64);
                }
                assert!((fast[k] - acc).abs() < 1e-12, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn round_trip_error_stays_tiny() {
        let mut rng = SplitMix64::new(17);
        for &n in &[8usize, 256, 4096, 65536] {
            let x: Vec<Complex> = (0..n).map(|_| Complex::real(rng.next_sym())).collect();
            let mut buf = x.clone();
            let plan = FftPlan::get(n);
            plan.forward(&mut buf);
            plan.inverse(&mut buf);
            let err = buf
                .iter()
                .zip(&x)
                .map(|(a, b)| (*a - *b).abs())
                .fold(0.0f64, f64::max);
            assert!(err < 1e-13, "round-trip error {err} at n = {n}");
        }
    }

    #[test]
    fn plans_are_shared() {
        let a = FftPlan::get(1024);
        let b = FftPlan::get(1024);
        assert!(Arc::ptr_eq(&a, &b));
    }
}
