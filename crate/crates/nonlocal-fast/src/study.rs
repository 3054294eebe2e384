//! Convergence studies: assemble, solve, measure the interior max-norm error
//! at the final time, and report one CSV row per `(gamma, M)`.

use crate::manufactured::{Manufactured, Profile};
use nonlocal_core::kernels2d::{
    assemble_additive, build_multiplicative, fan_integral_rect, Grid2D, QuadratureSpec,
};
use nonlocal_core::pqc::{assemble_operator, CollocationGrid, WeaklySingularKernel};
use nonlocal_core::solvers::{
    bdf4_run, crank_nicolson_run, steady_solve, CgsConfig, LinearOperator, Scheme, SolveReport,
    StartupPolicy, TimeProblem, TimeStepConfig,
};
use nonlocal_core::structured::FastOperator1D;
use nonlocal_core::util::norm_inf;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Steady1d,
    Cn1d,
    Bdf41d,
    Cn2dMult,
    Bdf42dMult,
    Cn2dAdd,
    Steady2dAdd,
}

impl Problem {
    pub fn parse(s: &str) -> Option<Problem> {
        match s {
            "steady1d" => Some(Problem::Steady1d),
            "cn1d" => Some(Problem::Cn1d),
            "bdf4-1d" => Some(Problem::Bdf41d),
            "cn2d-mult" => Some(Problem::Cn2dMult),
            "bdf4-2d-mult" => Some(Problem::Bdf42dMult),
            "cn2d-add" => Some(Problem::Cn2dAdd),
            "steady2d-add" => Some(Problem::Steady2dAdd),
            _ => None,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Problem::Steady1d => "steady1d",
            Problem::Cn1d => "cn1d",
            Problem::Bdf41d => "bdf4-1d",
            Problem::Cn2dMult => "cn2d-mult",
            Problem::Bdf42dMult => "bdf4-2d-mult",
            Problem::Cn2dAdd => "cn2d-add",
            Problem::Steady2dAdd => "steady2d-add",
        }
    }

    pub fn all_ids() -> &'static [&'static str] {
        &["steady1d", "cn1d", "bdf4-1d", "cn2d-mult", "bdf4-2d-mult", "cn2d-add", "steady2d-add"]
    }

    pub fn is_2d(&self) -> bool {
        !matches!(self, Problem::Steady1d | Problem::Cn1d | Problem::Bdf41d)
    }

    pub fn default_solution(&self) -> &'static str {
        match self {
            Problem::Steady1d | Problem::Cn1d | Problem::Bdf41d => "1d-quartic",
            Problem::Cn2dMult | Problem::Bdf42dMult => "2d-mult-quartic",
            Problem::Cn2dAdd => "2d-add-polyprod",
            Problem::Steady2dAdd => "2d-add-polyprod",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauRule {
    EqualH,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct StudySpec {
    pub problem: Problem,
    pub gammas: Vec<f64>,
    pub m_list: Vec<usize>,
    pub tau_rule: TauRule,
    pub domain: (f64, f64),
    pub t_final: f64,
    pub solution: String,
    pub cgs_tol: f64,
    pub threads: usize,
    /// BDF4 startup policy.
    pub startup: StartupPolicy,
}

impl StudySpec {
    pub fn for_problem(problem: Problem) -> StudySpec {
        let sol = Manufactured::by_id(problem.default_solution()).unwrap();
        StudySpec {
            problem,
            gammas: vec![0.5],
            m_list: vec![8, 16],
            tau_rule: TauRule::EqualH,
            domain: sol.domain,
            t_final: sol.t_final_default,
            solution: sol.id.to_string(),
            cgs_tol: 1e-12,
            threads: 1,
            startup: StartupPolicy::ExactHistory,
        }
    }
}

/// One study row, mirroring the CSV schema.
#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    pub problem: &'static str,
    pub gamma: f64,
    pub m: usize,
    pub tau: f64,
    pub error_inf: f64,
    pub rate: Option<f64>,
    pub cgs_iters_max: usize,
    pub wall_seconds: f64,
    pub failure: Option<String>,
}

/// Source quadrature orders for the additive manufactured solutions.
fn additive_source_orders(polynomial: bool) -> (usize, usize) {
    if polynomial {
        (32, 8)
    } else {
        (48, 32)
    }
}

fn tau_for(rule: TauRule, h: f64) -> f64 {
    match rule {
        TauRule::EqualH => h,
        TauRule::Fixed(t) => t,
    }
}

struct RowOutcome {
    error_inf: f64,
    iters: usize,
    tau: f64,
}

fn finish(report: &SolveReport, exact: &[f64], tau: f64) -> RowOutcome {
    let diff: Vec<f64> = report.solution.iter().zip(exact).map(|(a, b)| a - b).collect();
    RowOutcome { error_inf: norm_inf(&diff), iters: report.max_iterations(), tau }
}

fn run_row_1d(
    spec: &StudySpec,
    sol: &Manufactured,
    gamma: f64,
    m: usize,
) -> Result<RowOutcome, String> {
    let (a, b) = spec.domain;
    let grid = CollocationGrid::new(a, b, m).map_err(|e| e.to_string())?;
    let kernel = WeaklySingularKernel::new(gamma).map_err(|e| e.to_string())?;
    let op = FastOperator1D::new(assemble_operator(&grid, &kernel).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let cgs = CgsConfig::with_tol(spec.cgs_tol);

    // Spatial profiles: u = e^t v, f = e^t (v + L[v]), K(t) = e^t K(v trace).
    let v_interior = grid.sample_interior(|x| sol.v1(x));
    let nonlocal: Vec<f64> = grid.sample_interior(|x| sol.nonlocal_1d(x, gamma, a, b));
    let k_spatial = op.boundary_vector(sol.v1(a), sol.v1(b));

    match spec.problem {
        Problem::Steady1d => {
            let rep = steady_solve(&op, &nonlocal, &k_spatial, &cgs).map_err(|e| e.to_string())?;
            Ok(finish(&rep, &v_interior, f64::NAN))
        }
        Problem::Cn1d | Problem::Bdf41d => {
            let tau = tau_for(spec.tau_rule, grid.h());
            let scheme =
                if spec.problem == Problem::Cn1d { Scheme::CrankNicolson } else { Scheme::Bdf4 };
            let mut cfg =
                TimeStepConfig::new(scheme, tau, spec.t_final).map_err(|e| e.to_string())?;
            cfg.startup = spec.startup;
            let source = |t: f64| -> Vec<f64> {
                let s = t.exp();
                v_interior.iter().zip(&nonlocal).map(|(v, l)| s * (v + l)).collect()
            };
            let boundary = |t: f64| -> Vec<f64> {
                let s = t.exp();
                k_spatial.iter().map(|k| s * k).collect()
            };
            let problem = TimeProblem { op: &op, source: &source, boundary: &boundary };
            let rep = match scheme {
                Scheme::CrankNicolson => {
                    let u0 = v_interior.clone();
                    crank_nicolson_run(&problem, &u0, &cfg, &cgs).map_err(|e| e.to_string())?
                }
                Scheme::Bdf4 => {
                    let history = |t: f64| -> Vec<f64> {
                        let s = t.exp();
                        v_interior.iter().map(|v| s * v).collect()
                    };
                    bdf4_run(&problem, &history, &cfg, &cgs).map_err(|e| e.to_string())?
                }
            };
            let s = spec.t_final.exp();
            let exact: Vec<f64> = v_interior.iter().map(|v| s * v).collect();
            Ok(finish(&rep, &exact, tau))
        }
        _ => unreachable!(),
    }
}

fn run_row_2d(
    spec: &StudySpec,
    sol: &Manufactured,
    gamma: f64,
    m: usize,
) -> Result<RowOutcome, String> {
    let (a, b) = spec.domain;
    let grid = Grid2D::square(a, b, m).map_err(|e| e.to_string())?;
    let kernel = WeaklySingularKernel::new(gamma).map_err(|e| e.to_string())?;
    let cgs = CgsConfig::with_tol(spec.cgs_tol);

    let v_interior = grid.sample_interior(|x, y| sol.v2(x, y));

    // Operator, spatial nonlocal term and boundary profile per kernel type.
    let (op, nonlocal, k_spatial): (Box<dyn LinearOperator>, Vec<f64>, Vec<f64>) =
        match spec.problem {
            Problem::Cn2dMult | Problem::Bdf42dMult => {
                let op = build_multiplicative(&grid, &kernel).map_err(|e| e.to_string())?;
                let nl = grid.sample_interior(|x, y| sol.nonlocal_mult(x, y, gamma, spec.domain));
                let ks = op.boundary_vector(&|x, y| sol.v2(x, y));
                (Box::new(op), nl, ks)
            }
            Problem::Cn2dAdd | Problem::Steady2dAdd => {
                let mut quad = QuadratureSpec::default();
                quad.threads = spec.threads;
                let op = assemble_additive(&grid, &kernel, &quad).map_err(|e| e.to_string())?;
                let polynomial = matches!(sol.profile, Profile::Additive { polynomial: true, .. })
                    || matches!(sol.profile, Profile::Zero);
                let (ang, rad) = additive_source_orders(polynomial);
                let rect = (a, b, a, b);
                let nl: Vec<f64> = (0..grid.unknowns())
                    .map(|flat| {
                        let z = grid.point(flat);
                        let vz = sol.v2(z.0, z.1);
                        fan_integral_rect(
                            rect,
                            z,
                            gamma,
                            &|x, y| vz - sol.v2(x, y),
                            ang,
                            rad,
                        )
                    })
                    .collect();
                let ks = op.boundary_vector(&|x, y| sol.v2(x, y));
                (Box::new(op), nl, ks)
            }
            _ => unreachable!(),
        };

    match spec.problem {
        Problem::Steady2dAdd => {
            let rep =
                steady_solve(op.as_ref(), &nonlocal, &k_spatial, &cgs).map_err(|e| e.to_string())?;
            Ok(finish(&rep, &v_interior, f64::NAN))
        }
        _ => {
            let tau = tau_for(spec.tau_rule, grid.gx.h());
            let scheme = if spec.problem == Problem::Bdf42dMult {
                Scheme::Bdf4
            } else {
                Scheme::CrankNicolson
            };
            let mut cfg =
                TimeStepConfig::new(scheme, tau, spec.t_final).map_err(|e| e.to_string())?;
            cfg.startup = spec.startup;
            let source = |t: f64| -> Vec<f64> {
                let s = t.exp();
                v_interior.iter().zip(&nonlocal).map(|(v, l)| s * (v + l)).collect()
            };
            let boundary = |t: f64| -> Vec<f64> {
                let s = t.exp();
                k_spatial.iter().map(|k| s * k).collect()
            };
            let problem = TimeProblem { op: op.as_ref(), source: &source, boundary: &boundary };
            let rep = match scheme {
                Scheme::CrankNicolson => {
                    let u0 = v_interior.clone();
                    crank_nicolson_run(&problem, &u0, &cfg, &cgs).map_err(|e| e.to_string())?
                }
                Scheme::Bdf4 => {
                    let history = |t: f64| -> Vec<f64> {
                        let s = t.exp();
                        v_interior.iter().map(|v| s * v).collect()
                    };
                    bdf4_run(&problem, &history, &cfg, &cgs).map_err(|e| e.to_string())?
                }
            };
            let s = spec.t_final.exp();
            let exact: Vec<f64> = v_interior.iter().map(|v| s * v).collect();
            Ok(finish(&rep, &exact, tau))
        }
    }
}

fn run_row(spec: &StudySpec, sol: &Manufactured, gamma: f64, m: usize) -> Result<RowOutcome, String> {
    if spec.problem.is_2d() {
        run_row_2d(spec, sol, gamma, m)
    } else {
        run_row_1d(spec, sol, gamma, m)
    }
}

/// Runs the whole study. Rows may execute in parallel (`spec.threads`), but
/// the output order is always `(gamma outer, M inner)` in spec order. Solver
/// failures are recorded per row and the study continues.
pub fn run_study(spec: &StudySpec) -> Result<Vec<ConvergenceRecord>, String> {
    let sol = Manufactured::by_id(&spec.solution)
        .ok_or_else(|| format!("unknown manufactured solution `{}`", spec.solution))?;
    if spec.gammas.is_empty() || spec.m_list.is_empty() {
        return Ok(Vec::new());
    }
    let cases: Vec<(f64, usize)> = spec
        .gammas
        .iter()
        .flat_map(|&g| spec.m_list.iter().map(move |&m| (g, m)))
        .collect();

    // Additive assembly already parallelizes internally over coefficients, so
    // rows themselves run sequentially unless more threads than rows exist.
    let row_results: Vec<(f64, usize, Result<RowOutcome, String>, f64)> =
        if spec.threads > 1 && !matches!(spec.problem, Problem::Cn2dAdd | Problem::Steady2dAdd) {
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..spec.threads.min(cases.len()))
                    .map(|t| {
                        let cases = &cases;
                        let sol = &sol;
                        s.spawn(move || {
                            let mut local = Vec::new();
                            let mut i = t;
                            while i < cases.len() {
                                let (g, m) = cases[i];
                                let start = Instant::now();
                                let res = run_row(spec, sol, g, m);
                                local.push((i, (g, m, res, start.elapsed().as_secs_f64())));
                                i += spec.threads;
                            }
                            local
                        })
                    })
                    .collect();
                let mut indexed: Vec<(usize, (f64, usize, Result<RowOutcome, String>, f64))> =
                    handles.into_iter().flat_map(|h| h.join().unwrap()).collect();
                indexed.sort_by_key(|(i, _)| *i);
                indexed.into_iter().map(|(_, r)| r).collect()
            })
        } else {
            cases
                .iter()
                .map(|&(g, m)| {
                    let start = Instant::now();
                    let res = run_row(spec, &sol, g, m);
                    (g, m, res, start.elapsed().as_secs_f64())
                })
                .collect()
        };

    let mut records = Vec::with_capacity(row_results.len());
    let mut prev_err: Option<f64> = None;
    let mut prev_gamma = f64::NAN;
    for (gamma, m, res, wall) in row_results {
        if gamma != prev_gamma {
            prev_err = None;
            prev_gamma = gamma;
        }
        match res {
            Ok(row) => {
                let rate = prev_err.map(|p| (p / row.error_inf).log2());
                prev_err = Some(row.error_inf);
                records.push(ConvergenceRecord {
                    problem: spec.problem.id(),
                    gamma,
                    m,
                    tau: row.tau,
                    error_inf: row.error_inf,
                    rate,
                    cgs_iters_max: row.iters,
                    wall_seconds: wall,
                    failure: None,
                });
            }
            Err(msg) => {
                prev_err = None;
                records.push(ConvergenceRecord {
                    problem: spec.problem.id(),
                    gamma,
                    m,
                    tau: f64::NAN,
                    error_inf: f64::NAN,
                    rate: None,
                    cgs_iters_max: 0,
                    wall_seconds: wall,
                    failure: Some(msg),
                });
            }
        }
    }
    Ok(records)
}
