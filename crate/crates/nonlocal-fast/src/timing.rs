//! Wall-time measurements of the structured fast paths and the
//! `t = c M log M` complexity fit.

use nonlocal_core::pqc::{assemble_operator, CollocationGrid, WeaklySingularKernel};
use nonlocal_core::solvers::{cgs_solve, CgsConfig, ShiftedOperator};
use nonlocal_core::structured::FastOperator1D;
use nonlocal_core::util::{fit_through_origin, SplitMix64};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingProblem {
    /// One structured operator application.
    Matvec1d,
    /// One Crank-Nicolson step system solved by CGS.
    CnStep1d,
}

impl TimingProblem {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "matvec1d" => Some(TimingProblem::Matvec1d),
            "cnstep1d" => Some(TimingProblem::CnStep1d),
            _ => None,
        }
    }

    pub fn all_ids() -> &'static [&'static str] {
        &["matvec1d", "cnstep1d"]
    }
}

#[derive(Debug, Clone)]
pub struct ComplexityFit {
    /// Constant of the `t = c M log2 M` model.
    pub c: f64,
    pub r_squared: f64,
}

fn median_of(mut times: Vec<f64>) -> f64 {
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times[times.len() / 2]
}

/// Each timing sample batches enough repetitions to last at least this long,
/// so sub-millisecond operations are not at the mercy of scheduler noise.
const MIN_SAMPLE_SECONDS: f64 = 0.01;

fn sample(mut body: impl FnMut()) -> f64 {
    let t0 = Instant::now();
    body();
    let once = t0.elapsed().as_secs_f64();
    if once >= MIN_SAMPLE_SECONDS {
        return once;
    }
    let iters = (MIN_SAMPLE_SECONDS / once.max(1e-9)).ceil() as usize;
    let t0 = Instant::now();
    for _ in 0..iters {
        body();
    }
    t0.elapsed().as_secs_f64() / iters as f64
}

/// Median-of-5 wall time per `M`; the structured path only, no dense arrays.
pub fn run_timing(problem: TimingProblem, m_list: &[usize], gamma: f64) -> Vec<(usize, f64)> {
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let grid = CollocationGrid::new(0.0, 1.0, m).unwrap();
        let kernel = WeaklySingularKernel::new(gamma).unwrap();
        let op = FastOperator1D::new(assemble_operator(&grid, &kernel).unwrap()).unwrap();
        let mut rng = SplitMix64::new(m as u64);
        let u = rng.vector(op.dim());
        // One warm-up evaluation so FFT plans exist before timing.
        let _ = op.apply(&u).unwrap();
        let reps = 5;
        let mut times = Vec::with_capacity(reps);
        match problem {
            TimingProblem::Matvec1d => {
                for _ in 0..reps {
                    times.push(sample(|| {
                        std::hint::black_box(op.apply(&u).unwrap());
                    }));
                }
            }
            TimingProblem::CnStep1d => {
                let tau = grid.h();
                let shifted = ShiftedOperator::new(&op, 1.0, 0.5 * tau);
                let cfg = CgsConfig::with_tol(1e-9);
                let au = op.apply(&u).unwrap();
                let rhs: Vec<f64> =
                    u.iter().zip(&au).map(|(ui, aui)| ui - 0.5 * tau * aui).collect();
                for _ in 0..reps {
                    times.push(sample(|| {
                        std::hint::black_box(cgs_solve(&shifted, &rhs, &u, &cfg).unwrap());
                    }));
                }
            }
        }
        rows.push((m, median_of(times)));
    }
    rows
}

/// Fits the measured times to `t = c M log2 M`.
pub fn fit_m_log_m(rows: &[(usize, f64)]) -> ComplexityFit {
    let x: Vec<f64> = rows.iter().map(|(m, _)| *m as f64 * (*m as f64).log2()).collect();
    let y: Vec<f64> = rows.iter().map(|(_, t)| *t).collect();
    let (c, r_squared) = fit_through_origin(&x, &y);
    ComplexityFit { c, r_squared }
}
