use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use isoflow::config::env_factor;
use isoflow::flow::{certify, ellipsoid_distance, run, sphere_distance, FlowConfig, FlowError, Limit, ProblemSpec};
use isoflow::inequality::{parse_suite, run_suite, SuiteOptions};
use isoflow::refine::{parse_ladder, refinement_study};
use isoflow::{
    build_grid_with, make_body, BodyKind, BodySpec, DiffMethod, Resolution, ScalarField, SlackReport,
    SuiteSummary, Tolerances,
};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;
const EXIT_STEP_COLLAPSE: u8 = 4;
const MIN_ORDER: f64 = 3.0;

#[derive(Parser)]
#[command(name = "isoflow", version, about = "Support-function checks and isotropic curvature flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run inequality and identity checks on a body.
    Verify(VerifyArgs),
    /// Flow a body towards a solution of an isotropic curvature equation.
    Flow(FlowArgs),
    /// Measure how a check residual converges under grid refinement.
    RefineStudy(RefineArgs),
}

#[derive(Args)]
struct BodyArgs {
    /// Body spec: a JSON file or an inline JSON object.
    #[arg(long)]
    body: String,
    /// Grid resolution, `THETAxPHI` on the sphere or `N` on the circle.
    #[arg(long)]
    grid: Option<String>,
    /// Derivative discretisation: `spectral` or `fd`.
    #[arg(long, default_value = "spectral")]
    diff: DiffMethod,
    /// Worker threads; recorded in reports.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    body: BodyArgs,
    /// `all` or a comma-separated list of check families.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Allowed relative negative slack and identity residual.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Seed of the random test-function battery.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random cases in the battery family.
    #[arg(long, default_value_t = 8)]
    battery: usize,
    /// JSON report path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    body: BodyArgs,
    /// Problem, e.g. `gauss_power:alpha=1`, `lp:p=-2`, `sigma_k:k=1,phi=power,a=1,b=0`.
    #[arg(long)]
    problem: String,
    /// Stop once the sup-norm of the residual drops below this.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_steps: usize,
    /// Initial time step.
    #[arg(long)]
    dt0: Option<f64>,
    /// Final body as JSON samples.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace CSV path.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Certification report path (stdout when absent).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RefineArgs {
    /// Body spec: a JSON file or an inline JSON object.
    #[arg(long)]
    body: String,
    /// Check to study.
    #[arg(long)]
    suite: String,
    /// Comma-separated resolution ladder, e.g. `16x32,24x48,32x64`.
    #[arg(long)]
    grid: String,
    #[arg(long, default_value = "spectral")]
    diff: DiffMethod,
    /// CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, message: e.to_string() }
}

fn io(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_CHECK_FAILED, message: format!("{}: {e}", path.display()) }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Flow(a) => flow(a),
        Command::RefineStudy(a) => refine(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_spec(body: &str) -> Result<BodySpec, Failure> {
    let text = if body.trim_start().starts_with('{') {
        body.to_string()
    } else {
        fs::read_to_string(body).map_err(|e| usage(format!("{body}: {e}")))?
    };
    BodySpec::from_json(&text).map_err(usage)
}

fn pick_resolution(spec: &BodySpec, grid: Option<&str>) -> Result<Resolution, Failure> {
    let res = match (grid, &spec.kind) {
        (Some(g), _) => g.parse::<Resolution>().map_err(usage)?,
        (None, BodyKind::Samples { grid, .. }) => *grid,
        (None, _) => Resolution::reference(spec.n.unwrap_or(2)).map_err(usage)?,
    };
    match spec.n {
        Some(n) if n != res.dim() => Err(usage(format!("body has n = {n} but grid {res} is {}-dimensional", res.dim()))),
        _ => Ok(res),
    }
}

fn load_body(a: &BodyArgs) -> Result<ScalarField, Failure> {
    if a.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    let spec = read_spec(&a.body)?;
    let res = pick_resolution(&spec, a.grid.as_deref())?;
    let grid = build_grid_with(res.dim(), res, a.diff).map_err(usage)?;
    make_body(&spec, &grid).map_err(usage)
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| usage(e.to_string()))
}

fn verify(a: VerifyArgs) -> Result<u8, Failure> {
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(usage("--tol must be positive"));
    }
    let h = load_body(&a.body)?;
    let families = parse_suite(&a.suite).map_err(usage)?;
    let tol = Tolerances::default().with_grid(a.tol).with_env();
    let reports: Vec<SlackReport> = pool(a.body.threads)?.install(|| {
        families
            .par_iter()
            .map(|f| {
                let opts = SuiteOptions { families: vec![f.clone()], seed: a.seed, battery: a.battery, tol };
                run_suite(&h, &opts)
            })
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(usage)?
    .into_iter()
    .flatten()
    .collect();
    let summary = SuiteSummary::from_reports(&h.grid().resolution().to_string(), &h.content_hash(), a.body.threads, reports);
    for (name, f) in &summary.families {
        eprintln!(
            "{name:<22} {:>4} checks  {:>3} failed  worst slack {}  worst residual {}",
            f.count,
            f.failures,
            f.worst_relative_slack.map_or("-".into(), |v| format!("{v:.3e}")),
            f.worst_residual.map_or("-".into(), |v| format!("{v:.3e}")),
        );
    }
    write_or_print(a.out.as_deref(), &(summary.to_json() + "\n"))?;
    Ok(if summary.all_passed { 0 } else { EXIT_CHECK_FAILED })
}

#[derive(Serialize)]
struct FlowReport {
    problem: String,
    grid: String,
    initial_body_hash: String,
    final_body_hash: String,
    threads: usize,
    status: &'static str,
    steps: usize,
    t: f64,
    residual_inf: f64,
    sphere_dist: f64,
    ellipsoid_dist: f64,
    expected_limit: &'static str,
    hypothesis_violations: Vec<String>,
    certified: bool,
    certification: Vec<SlackReport>,
}

fn flow(a: FlowArgs) -> Result<u8, Failure> {
    let prob: ProblemSpec = a.problem.parse().map_err(usage)?;
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(usage("--tol must be positive"));
    }
    if a.dt0.is_some_and(|d| d.is_nan() || d <= 0.0) {
        return Err(usage("--dt0 must be positive"));
    }
    let h = load_body(&a.body)?;
    let n = h.grid().dim();
    let k = prob.order(n);
    if k == 0 || k > n {
        return Err(usage(format!("order k = {k} outside 1..={n}")));
    }
    let tol = Tolerances::from_env();
    let cfg = FlowConfig { dt0: a.dt0, tol: a.tol * env_factor(), max_steps: a.max_steps };
    let outcome = run(&h, &prob, &cfg);

    let (status, code, state, trace) = match &outcome {
        Ok(o) => ("converged", 0, &o.state, &o.trace),
        Err(FlowError::NoConvergence { state, trace, .. }) => ("no_convergence", EXIT_NO_CONVERGENCE, &**state, &**trace),
        Err(FlowError::StepCollapse { state, trace, .. }) => ("step_collapse", EXIT_STEP_COLLAPSE, &**state, &**trace),
        Err(FlowError::Geometry(e)) => return Err(usage(e)),
    };
    let (certification, residual_inf) = match &outcome {
        Ok(o) => (certify(&o.geometry, &prob, &tol).map_err(usage)?, o.residual.sup_norm()),
        Err(_) => (Vec::new(), trace.last().map_or(f64::NAN, |r| r.residual_inf)),
    };
    let certified = outcome.is_ok() && certification.iter().all(SlackReport::passed);
    let report = FlowReport {
        problem: prob.to_string(),
        grid: h.grid().resolution().to_string(),
        initial_body_hash: h.content_hash(),
        final_body_hash: state.h.content_hash(),
        threads: a.body.threads,
        status,
        steps: state.steps,
        t: state.t,
        residual_inf,
        sphere_dist: sphere_distance(&state.h),
        ellipsoid_dist: ellipsoid_distance(&state.h),
        expected_limit: match prob.expected_limit(n) {
            Limit::Sphere => "sphere",
            Limit::Ellipsoid => "ellipsoid",
        },
        hypothesis_violations: prob.hypothesis_violations(n),
        certified,
        certification,
    };

    if let Some(p) = &a.trace {
        fs::write(p, trace.to_csv()).map_err(|e| io(p, e))?;
    }
    if let Some(p) = &a.out {
        let body = BodySpec {
            n: Some(n),
            kind: BodyKind::Samples { grid: h.grid().resolution(), values: state.h.values().to_vec() },
        };
        fs::write(p, body.to_json() + "\n").map_err(|e| io(p, e))?;
    }
    let json = serde_json::to_string_pretty(&report).expect("flow reports serialise");
    write_or_print(a.report.as_deref(), &(json + "\n"))?;
    eprintln!(
        "{}: {status} after {} steps, residual {:.3e}, sphere_dist {:.3e}, ellipsoid_dist {:.3e}, certified {certified}",
        report.problem, report.steps, report.residual_inf, report.sphere_dist, report.ellipsoid_dist
    );
    Ok(match code {
        0 if !certified => EXIT_CHECK_FAILED,
        c => c,
    })
}

fn refine(a: RefineArgs) -> Result<u8, Failure> {
    let spec = read_spec(&a.body)?;
    let ladder = parse_ladder(&a.grid).map_err(usage)?;
    if let Some(r) = ladder.iter().find(|r| spec.n.is_some_and(|n| n != r.dim())) {
        return Err(usage(format!("grid {r} does not match the body dimension")));
    }
    let tol = Tolerances::from_env();
    let study = refinement_study(&a.suite, &spec, &ladder, a.diff, &tol).map_err(usage)?;
    write_or_print(a.out.as_deref(), &study.to_csv())?;
    let order = study.final_order.map_or("-".into(), |o| format!("{o:.2}"));
    let note = if study.exact { " (exact: roundoff at every rung)" } else { "" };
    eprintln!("{}: final-pair order {order}{note}", study.check);
    Ok(if study.passed(MIN_ORDER) { 0 } else { EXIT_CHECK_FAILED })
}
