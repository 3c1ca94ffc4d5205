//! Subcommand drivers and the artifacts they write.
//!
//! `solve_report.json` holds no timings so two runs with the same config and
//! seed produce identical bytes; wall-clock times go to `timings.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use fnell_torus::io::{write_csv_slice, write_scalar_field};
use fnell_torus::solver::{ProblemSpec, SolveReport, Solver};
use fnell_torus::TorusError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abp::{run_abp, AbpSuite};
use crate::certify::{certify, CertificationReport, CertificationStatus};
use crate::config::{Mode, RunConfig};
use crate::problem::{build_problem, torus_exit_code, RunError, EXIT_OK, EXIT_REFUTED};
use crate::selftest::{operator_suite, run_selftest, OperatorSuite, SelftestReport};

pub const SCHEMA: &str = "v1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Cases per operator in the `--check-only` property suite.
const CHECK_CASES: usize = 200;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: &'static str,
    version: &'static str,
    command: &'static str,
    status: &'static str,
    exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    certification: Option<&'a CertificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    operator_suite: Option<&'a OperatorSuite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solve: Option<&'a SolveReport>,
}

#[derive(Serialize, Default)]
struct Timings {
    build_seconds: f64,
    certify_seconds: f64,
    check_seconds: f64,
    solve_seconds: f64,
    total_seconds: f64,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn status_of(code: i32) -> &'static str {
    match code {
        0 => "ok",
        1 => "config_error",
        2 => "stagnation",
        3 => "domain_error",
        4 => "io_error",
        _ => "refuted",
    }
}

fn describe_grid(cfg: &RunConfig) -> String {
    let g = &cfg.grid;
    let kind = match g.mode {
        Mode::Complex => "complex",
        Mode::Real => "real",
    };
    let axes = match g.mode {
        Mode::Complex if g.resolve_imaginary => 2 * g.dimension,
        _ => g.dimension,
    };
    format!("{kind} dimension {}, {}^{axes} grid", g.dimension, g.points_per_axis)
}

fn describe_certification(c: &CertificationReport) -> String {
    match (&c.status, &c.certificate) {
        (CertificationStatus::NotApplicable, _) => "not applicable".into(),
        (CertificationStatus::Certified, Some(cert)) => {
            format!("certified at δ = {}, R = {:.3e}, κ = {:.3e}", cert.delta, cert.radius, cert.kappa)
        }
        (CertificationStatus::Refuted, _) => match &c.witness_coordinates {
            Some(x) => format!("refuted, witness at {x:?}"),
            None => "refuted by the quotient cone condition".into(),
        },
        _ => "certified".into(),
    }
}

/// `solve` and `solve --check-only`.
pub fn solve(cfg: &RunConfig, out: &Path, check_only: bool) -> Result<Outcome, RunError> {
    let start = Instant::now();
    let mut timings = Timings::default();
    fs::create_dir_all(out)?;
    let problem = build_problem(cfg)?;
    timings.build_seconds = start.elapsed().as_secs_f64();

    let mut summary = String::new();
    let _ = writeln!(summary, "fnell {VERSION}: {}", if check_only { "check" } else { "solve" });
    let _ = writeln!(summary, "operator       {}", problem.op.name());
    let _ = writeln!(summary, "grid           {}", describe_grid(cfg));
    let path = serde_json::to_value(cfg.path.kind)?;
    let _ = writeln!(summary, "path           {}, {} steps scheduled", path.as_str().unwrap_or("?"), cfg.path.schedule.len() - 1);

    let t = Instant::now();
    let certification = if cfg.certify.subsolution { Some(certify(&problem, cfg)?) } else { None };
    timings.certify_seconds = t.elapsed().as_secs_f64();
    if let Some(c) = &certification {
        write_json(&out.join("certificate.json"), c)?;
        let _ = writeln!(summary, "subsolution    u = 0 {}", describe_certification(c));
    }
    let refuted = certification.as_ref().is_some_and(|c| c.refuted());

    let mut suite = None;
    let mut solved: Option<SolveReport> = None;
    let mut error = None;
    let exit_code = if refuted {
        EXIT_REFUTED
    } else if check_only {
        let t = Instant::now();
        let s = operator_suite(&problem.op, CHECK_CASES, &mut ChaCha8Rng::seed_from_u64(cfg.seed));
        timings.check_seconds = t.elapsed().as_secs_f64();
        let _ = writeln!(
            summary,
            "property suite {} ({} cases, F' err {:.1e}, F'' err {:.1e})",
            if s.passed { "passed" } else { "FAILED" },
            s.cases,
            s.first_derivative_error,
            s.second_derivative_error
        );
        let code = if s.passed { EXIT_OK } else { EXIT_REFUTED };
        suite = Some(s);
        code
    } else {
        let t = Instant::now();
        let result = ProblemSpec::new(problem.op.clone(), problem.alpha.clone(), problem.chi.clone(), problem.h.clone(), cfg.path.kind)
            .map(|spec| {
                spec.with_normalization(cfg.path.normalization)
                    .with_tolerance(cfg.solver.tolerance)
                    .with_max_iterations(cfg.solver.max_iterations)
            })
            .and_then(Solver::new)
            .and_then(|solver| solver.run_continuity(&cfg.path.schedule));
        timings.solve_seconds = t.elapsed().as_secs_f64();
        match result {
            Ok(report) => {
                solved = Some(report);
                EXIT_OK
            }
            Err(TorusError::Aborted { report, cause }) => {
                let code = torus_exit_code(&cause);
                error = Some(cause.to_string());
                solved = Some(*report);
                code
            }
            Err(e) => {
                let code = torus_exit_code(&e);
                error = Some(e.to_string());
                code
            }
        }
    };

    if let Some(r) = &solved {
        write_scalar_field(&out.join("u"), &r.u)?;
        write_csv_slice(&r.u, fs::File::create(out.join("u_slice.csv"))?)?;
        let _ = writeln!(summary, "completed      {} (final t = {})", r.completed, r.final_t);
        let _ = writeln!(summary, "c              {:.12}", r.c);
        let _ = writeln!(summary, "residual       {:.3e}", r.residual);
        let _ = writeln!(summary, "margin         {:.3e}", r.admissibility_margin);
        let _ = writeln!(summary, "c_t bounds     {}", if r.bounds_hold { "hold" } else { "VIOLATED" });
        if let Some(q) = r.quotient_constant {
            let _ = writeln!(summary, "compute_c      {q:.12}");
        }
        if let Some(hmw) = r.diagnostics.as_ref().and_then(|d| d.hmw.as_ref()) {
            let _ = writeln!(summary, "hmw ratio      {:.3e} (sup|∂∂̄u| {:.3e}, sup|∇u|² {:.3e})", hmw.ratio, hmw.sup_dd_u, hmw.sup_grad_sq);
        }
    }
    write_scalar_field(&out.join("h"), &problem.h)?;
    if let Some(e) = &error {
        let _ = writeln!(summary, "error          {e}");
    }
    let _ = writeln!(summary, "status         {} (exit {exit_code})", status_of(exit_code));

    let report = Report {
        schema: SCHEMA,
        version: VERSION,
        command: if check_only { "check" } else { "solve" },
        status: status_of(exit_code),
        exit_code,
        error,
        config: cfg,
        certification: certification.as_ref(),
        operator_suite: suite.as_ref(),
        solve: solved.as_ref(),
    };
    write_json(&out.join("solve_report.json"), &report)?;
    fs::write(out.join("summary.txt"), &summary)?;
    timings.total_seconds = start.elapsed().as_secs_f64();
    write_json(&out.join("timings.json"), &timings)?;
    Ok(Outcome { exit_code, summary })
}

/// `certify`: the subsolution test alone, whatever `certify.subsolution` says.
pub fn certify_only(cfg: &RunConfig, out: &Path) -> Result<Outcome, RunError> {
    fs::create_dir_all(out)?;
    let problem = build_problem(cfg)?;
    let c = certify(&problem, cfg)?;
    write_json(&out.join("certificate.json"), &c)?;
    let exit_code = if c.refuted() { EXIT_REFUTED } else { EXIT_OK };
    let summary = format!(
        "fnell {VERSION}: certify\noperator       {}\nlevel          σ = {}\nsubsolution    u = 0 {}\nstatus         {} (exit {exit_code})\n",
        problem.op.name(),
        c.level,
        describe_certification(&c),
        status_of(exit_code)
    );
    fs::write(out.join("summary.txt"), &summary)?;
    Ok(Outcome { exit_code, summary })
}

#[derive(Serialize)]
struct SuiteReport<'a, T> {
    schema: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    passed: bool,
    result: &'a T,
}

pub fn selftest(seed: u64, cases: usize, out: &Path) -> Result<Outcome, RunError> {
    fs::create_dir_all(out)?;
    let report: SelftestReport = run_selftest(cases, &mut ChaCha8Rng::seed_from_u64(seed));
    write_json(
        &out.join("selftest_report.json"),
        &SuiteReport { schema: SCHEMA, version: VERSION, command: "selftest", seed, passed: report.passed, result: &report },
    )?;
    let mut summary = format!("fnell {VERSION}: selftest (seed {seed}, {cases} cases per operator)\n");
    for s in &report.operators {
        let _ = writeln!(
            summary,
            "{:<6} {:<40} F' {:.1e}  F'' {:.1e}  concavity {}  ellipticity {}  comparability {}",
            if s.passed { "PASS" } else { "FAIL" },
            s.operator,
            s.first_derivative_error,
            s.second_derivative_error,
            s.concavity_violations,
            s.ellipticity_failures,
            s.comparability_failures
        );
    }
    let r = &report.subsolution_rays;
    let _ = writeln!(
        summary,
        "{:<6} subsolution criterion vs rays: {} cases, {} disagreements",
        if r.passed { "PASS" } else { "FAIL" },
        r.cases,
        r.disagreements
    );
    let exit_code = if report.passed { EXIT_OK } else { EXIT_REFUTED };
    Ok(Outcome { exit_code, summary })
}

pub fn abp(seed: u64, points: usize, cases: usize, out: &Path) -> Result<Outcome, RunError> {
    fs::create_dir_all(out)?;
    let suite: AbpSuite = run_abp(points, cases, &mut ChaCha8Rng::seed_from_u64(seed))?;
    write_json(
        &out.join("abp_report.json"),
        &SuiteReport { schema: SCHEMA, version: VERSION, command: "abp", seed, passed: suite.passed, result: &suite },
    )?;
    let passing = suite.wells.iter().filter(|w| w.passed).count();
    let tightest = suite.wells.iter().map(|w| w.integral_det / w.lower_bound).fold(f64::INFINITY, f64::min);
    let summary = format!(
        "fnell {VERSION}: abp ({points}^2 grid, seed {seed})\nquadratic      ∫_P det = {:.6} vs 0.04π = {:.6} ({:.2}% off)\nrandom wells   {passing}/{} pass, smallest ∫det/c₀ε² = {tightest:.3}\nstatus         {}\n",
        suite.quadratic.report.integral_det,
        suite.quadratic.derived,
        100.0 * suite.quadratic.relative_error,
        suite.wells.len(),
        if suite.passed { "ok" } else { "refuted" }
    );
    Ok(Outcome { exit_code: if suite.passed { EXIT_OK } else { EXIT_REFUTED }, summary })
}
