//! Flag parsing and subcommand dispatch for the `nonlocal-fast` binary.
//!
//! Exit codes: 0 on success, 1 on a usage/specification error, 2 when any
//! study row failed to solve (remaining rows still run and are written).

use crate::csv;
use crate::diag::{run_diagnostics, DiagProblem};
use crate::study::{run_study, Problem, StudySpec, TauRule};
use crate::timing::{fit_m_log_m, run_timing, TimingProblem};
use nonlocal_core::solvers::StartupPolicy;
use std::fs::File;
use std::io::Write;

const USAGE: &str = "\
nonlocal-fast: convergence studies, timing and diagnostics for nonlocal
diffusion solvers with weakly singular kernels.

USAGE:
  nonlocal-fast study  --problem <id> --gamma <g1,g2,..> --M <m1,m2,..>
                       [--tau equal-h | --tau <value>] [--T <t>]
                       [--solution <id>] [--domain <a,b>] [--tol <tol>]
                       [--startup exact|cn-ramp] [--threads <n>]
                       [--out <file>]
  nonlocal-fast timing --problem matvec1d|cnstep1d --M <m1,m2,..>
                       [--gamma <g>] [--out <file>]
  nonlocal-fast diag   --problem 1d|2d-mult|2d-add --gamma <g> --M <m>
                       [--threads <n>] [--out <file>]

Study problems: steady1d cn1d bdf4-1d cn2d-mult bdf4-2d-mult cn2d-add
steady2d-add. Manufactured solutions: 1d-quartic 2d-mult-quartic
2d-add-exptrig 2d-add-polyprod zero. Output goes to stdout when --out is
omitted.";

struct Args {
    flags: Vec<(String, String)>,
}

impl Args {
    fn parse(argv: &[String]) -> Result<Args, String> {
        let mut flags = Vec::new();
        let mut i = 0;
        while i < argv.len() {
            let a = &argv[i];
            if let Some(name) = a.strip_prefix("--") {
                let value = argv
                    .get(i + 1)
                    .ok_or_else(|| format!("flag --{name} expects a value"))?;
                flags.push((name.to_string(), value.clone()));
                i += 2;
            } else {
                return Err(format!("unexpected argument `{a}`"));
            }
        }
        Ok(Args { flags })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.flags.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }

    fn require(&self, name: &str) -> Result<&str, String> {
        self.get(name).ok_or_else(|| format!("missing required flag --{name}"))
    }

    fn unknown_flags(&self, allowed: &[&str]) -> Option<String> {
        self.flags
            .iter()
            .find(|(n, _)| !allowed.contains(&n.as_str()))
            .map(|(n, _)| n.clone())
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .filter(|p| !p.is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("cannot parse `{p}` in --{what}")))
        .collect()
}

fn write_output(path: Option<&str>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => {
            let mut f = File::create(p).map_err(|e| format!("cannot create {p}: {e}"))?;
            f.write_all(content.as_bytes()).map_err(|e| format!("cannot write {p}: {e}"))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_study(args: &Args) -> Result<i32, String> {
    if let Some(f) = args.unknown_flags(&[
        "problem", "gamma", "M", "tau", "T", "solution", "domain", "tol", "startup", "threads",
        "out",
    ]) {
        return Err(format!("unknown flag --{f} for `study`"));
    }
    let problem = Problem::parse(args.require("problem")?).ok_or_else(|| {
        format!("unknown problem; expected one of {:?}", Problem::all_ids())
    })?;
    let mut spec = StudySpec::for_problem(problem);
    spec.gammas = parse_list(args.require("gamma")?, "gamma")?;
    for &g in &spec.gammas {
        if !(g > 0.0 && g < 1.0) {
            return Err(format!("gamma = {g} outside (0, 1)"));
        }
    }
    spec.m_list = parse_list(args.require("M")?, "M")?;
    if spec.m_list.iter().any(|&m| m < 2) {
        return Err("every M must be at least 2".into());
    }
    if let Some(tau) = args.get("tau") {
        spec.tau_rule = if tau == "equal-h" {
            TauRule::EqualH
        } else {
            TauRule::Fixed(tau.parse().map_err(|_| format!("cannot parse --tau {tau}"))?)
        };
    }
    if let Some(t) = args.get("T") {
        spec.t_final = t.parse().map_err(|_| format!("cannot parse --T {t}"))?;
        if spec.t_final <= 0.0 {
            return Err("final time must be positive".into());
        }
    }
    if let Some(sol) = args.get("solution") {
        spec.solution = sol.to_string();
    }
    if let Some(dom) = args.get("domain") {
        let ab: Vec<f64> = parse_list(dom, "domain")?;
        if ab.len() != 2 || ab[0] >= ab[1] {
            return Err("domain must be `a,b` with a < b".into());
        }
        spec.domain = (ab[0], ab[1]);
    }
    if let Some(tol) = args.get("tol") {
        spec.cgs_tol = tol.parse().map_err(|_| format!("cannot parse --tol {tol}"))?;
        if spec.cgs_tol <= 0.0 {
            return Err("tolerance must be positive".into());
        }
    }
    if let Some(st) = args.get("startup") {
        spec.startup = match st {
            "exact" => StartupPolicy::ExactHistory,
            "cn-ramp" => StartupPolicy::CnRampUp,
            _ => return Err("startup must be `exact` or `cn-ramp`".into()),
        };
    }
    if let Some(t) = args.get("threads") {
        spec.threads = t.parse().map_err(|_| format!("cannot parse --threads {t}"))?;
        if spec.threads == 0 {
            return Err("threads must be at least 1".into());
        }
    }

    let records = run_study(&spec)?;
    let mut buf = Vec::new();
    csv::write_study(&records, &mut buf).map_err(|e| e.to_string())?;
    write_output(args.get("out"), &String::from_utf8(buf).unwrap())?;
    let mut failed = false;
    for r in &records {
        if let Some(msg) = &r.failure {
            failed = true;
            eprintln!("row gamma={} M={} failed: {msg}", r.gamma, r.m);
        }
    }
    Ok(if failed { 2 } else { 0 })
}

fn cmd_timing(args: &Args) -> Result<i32, String> {
    if let Some(f) = args.unknown_flags(&["problem", "M", "gamma", "out"]) {
        return Err(format!("unknown flag --{f} for `timing`"));
    }
    let problem = TimingProblem::parse(args.require("problem")?).ok_or_else(|| {
        format!("unknown timing problem; expected one of {:?}", TimingProblem::all_ids())
    })?;
    let m_list: Vec<usize> = parse_list(args.require("M")?, "M")?;
    let gamma: f64 = args.get("gamma").unwrap_or("0.5").parse().map_err(|_| "bad --gamma")?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(format!("gamma = {gamma} outside (0, 1)"));
    }
    let rows = run_timing(problem, &m_list, gamma);
    let mut buf = Vec::new();
    csv::write_timing(&rows, &mut buf).map_err(|e| e.to_string())?;
    write_output(args.get("out"), &String::from_utf8(buf).unwrap())?;
    if rows.len() >= 2 {
        let fit = fit_m_log_m(&rows);
        eprintln!("fit t = c * M log2 M: c = {:.3e}, R^2 = {:.4}", fit.c, fit.r_squared);
    }
    Ok(0)
}

fn cmd_diag(args: &Args) -> Result<i32, String> {
    if let Some(f) = args.unknown_flags(&["problem", "gamma", "M", "threads", "out"]) {
        return Err(format!("unknown flag --{f} for `diag`"));
    }
    let problem = DiagProblem::parse(args.require("problem")?).ok_or_else(|| {
        format!("unknown diag problem; expected one of {:?}", DiagProblem::all_ids())
    })?;
    let gamma: f64 = args.require("gamma")?.parse().map_err(|_| "bad --gamma")?;
    let m: usize = args.require("M")?.parse().map_err(|_| "bad --M")?;
    let threads: usize = args.get("threads").unwrap_or("1").parse().map_err(|_| "bad --threads")?;
    let text = run_diagnostics(problem, gamma, m, threads).map_err(|e| e.to_string())?;
    write_output(args.get("out"), &text)?;
    Ok(0)
}

/// Entry point; returns the process exit code.
pub fn run(argv: &[String]) -> i32 {
    if argv.is_empty() || argv[0] == "--help" || argv[0] == "help" {
        println!("{USAGE}");
        return if argv.is_empty() { 1 } else { 0 };
    }
    let cmd = argv[0].as_str();
    let args = match Args::parse(&argv[1..]) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}\n\n{USAGE}");
            return 1;
        }
    };
    let result = match cmd {
        "study" => cmd_study(&args),
        "timing" => cmd_timing(&args),
        "diag" => cmd_diag(&args),
        other => Err(format!("unknown subcommand `{other}`")),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}\n\n{USAGE}");
            1
        }
    }
}
