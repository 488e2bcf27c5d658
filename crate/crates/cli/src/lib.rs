//! Command implementations behind the `neurolasso` binary.
//!
//! Exit codes: `0` certified success, `2` not converged or not certified,
//! `1` usage or I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use neurolasso::io::{self, MatrixFormat};
use neurolasso::{
    build_instance_with, certify, fista_solve, fixed_point_residual, generate, ista_solve,
    least_norm_solution, primal_objective, recovery_metrics, sign_pattern_oracle, solve_monitored,
    BaselineConfig, Certificate, DVector, ExperimentSpec, GramCache, GramMode, LyapunovMonitor,
    ProblemInstance, RecoveryMetrics, SolveResult, SolveStatus, SolverConfig, StepRule, VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CERTIFIED: i32 = 2;

/// Relative objective gap above which `compare` flags two solvers.
pub const DISAGREEMENT_TOL: f64 = 1e-5;

pub const INSTANCE_FILE: &str = "instance.json";

#[derive(Debug, Parser)]
#[command(
    name = "neurolasso",
    version,
    about = "Lasso via a one-layer projection neural network"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic spike-recovery instance.
    Generate(GenerateArgs),
    /// Solve an instance and certify the result.
    Solve(SolveArgs),
    /// Certify a candidate solution.
    Certify(CertifyArgs),
    /// Run several solvers on one instance and compare them.
    Compare(CompareArgs),
    /// End-to-end experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Generate, solve, certify and score a spike-recovery problem.
    SignalRecovery(SignalRecoveryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Neural,
    Ista,
    Fista,
    Oracle,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Neural => "neural",
            SolverKind::Ista => "ista",
            SolverKind::Fista => "fista",
            SolverKind::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Experiment spec (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "binary")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Binary,
}

impl From<FormatArg> for MatrixFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => MatrixFormat::Csv,
            FormatArg::Binary => MatrixFormat::Binary,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverOptions {
    /// Solver settings (JSON, see `RunConfig`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Residual tolerance for both stopping and certification.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Apply AᵀA as two products instead of forming it.
    #[arg(long)]
    pub matrix_free: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance directory or its `instance.json`.
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "neural")]
    pub solver: SolverKind,
    #[command(flatten)]
    pub opts: SolverOptions,
    /// Write the trajectory CSV here.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Add a Lyapunov column to the trajectory (costs a reference solve).
    #[arg(long)]
    pub lyapunov: bool,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the solution vector (CSV if the extension is `.csv`, else binary).
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Vector file, or a JSON report from `solve`.
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub matrix_free: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Solvers to run (repeat or comma-separate); at least two.
    #[arg(long = "solver", value_enum, value_delimiter = ',', required = true)]
    pub solvers: Vec<SolverKind>,
    #[command(flatten)]
    pub opts: SolverOptions,
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// CSV table path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SignalRecoveryArgs {
    /// Experiment spec (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for the report and plot data.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "neural")]
    pub solver: SolverKind,
    /// Solver settings (JSON, see `RunConfig`).
    #[arg(long)]
    pub solver_config: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub matrix_free: bool,
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Support detection threshold for recall/precision.
    #[arg(long, default_value_t = 0.5)]
    pub support_threshold: f64,
}

/// Solver settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub neural: SolverConfig,
    pub baseline: BaselineConfig,
    /// Tolerance for the certificate verdicts.
    pub certify_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            neural: SolverConfig::default(),
            baseline: BaselineConfig::default(),
            certify_tol: 1e-8,
        }
    }
}

impl RunConfig {
    fn load(path: Option<&Path>, tol: Option<f64>) -> Result<Self> {
        let mut cfg: RunConfig = match path {
            Some(p) => read_json(p)?,
            None => RunConfig::default(),
        };
        if let Some(t) = tol {
            if !(t > 0.0 && t.is_finite()) {
                bail!("--tol must be positive, got {t}");
            }
            cfg.neural.tol = t;
            cfg.baseline.tol = t;
            cfg.certify_tol = t;
        }
        Ok(cfg)
    }
}

/// Metadata written next to the matrix files of an instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub n: usize,
    pub l: usize,
    pub lambda: f64,
    pub a: String,
    pub b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ExperimentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
}

pub struct LoadedInstance {
    pub meta: InstanceMeta,
    pub path: PathBuf,
    pub inst: ProblemInstance,
    pub cache: GramCache,
    pub x0: Option<DVector<f64>>,
}

fn meta_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(INSTANCE_FILE)
    } else {
        path.to_path_buf()
    }
}

pub fn load_instance(path: &Path, mode: GramMode) -> Result<LoadedInstance> {
    let meta_file = meta_path(path);
    let meta: InstanceMeta = read_json(&meta_file)?;
    let dir = meta_file.parent().unwrap_or(Path::new("."));
    let a = io::load_matrix(dir.join(&meta.a)).with_context(|| format!("reading {}", meta.a))?;
    let b = io::load_vector(dir.join(&meta.b)).with_context(|| format!("reading {}", meta.b))?;
    if a.shape() != (meta.n, meta.l) {
        bail!(
            "{} is {:?} but instance.json declares {}x{}",
            meta.a,
            a.shape(),
            meta.n,
            meta.l
        );
    }
    let x0 = match &meta.x0 {
        Some(f) => Some(io::load_vector(dir.join(f)).with_context(|| format!("reading {f}"))?),
        None => None,
    };
    let (inst, cache) = build_instance_with(a, b, meta.lambda, mode)?;
    Ok(LoadedInstance {
        meta,
        path: meta_file,
        inst,
        cache,
        x0,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn gram_mode(matrix_free: bool) -> GramMode {
    if matrix_free {
        GramMode::MatrixFree
    } else {
        GramMode::Dense
    }
}

fn format_for(path: &Path) -> MatrixFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => MatrixFormat::Csv,
        _ => MatrixFormat::Binary,
    }
}

/// Outcome of one solver run, already certified.
#[derive(Debug, Clone, Serialize)]
pub struct SolverOutcome {
    pub solver: SolverKind,
    pub status: SolveStatus,
    pub steps_taken: usize,
    pub final_residual: f64,
    pub objective: f64,
    pub nonzeros: usize,
    pub pseudo_time: f64,
    pub step_size: f64,
    pub wall_seconds: f64,
    pub certified: bool,
    #[serde(skip)]
    pub result: SolveResult,
    #[serde(skip)]
    pub certificate: Certificate,
}

pub fn run_solver(
    kind: SolverKind,
    inst: &ProblemInstance,
    cache: &GramCache,
    cfg: &RunConfig,
    monitor: Option<&LyapunovMonitor>,
) -> Result<SolverOutcome> {
    let start = Instant::now();
    let result = match kind {
        SolverKind::Neural => solve_monitored(inst, cache, &cfg.neural, None, monitor)?,
        SolverKind::Ista => ista_solve(inst, cache, &cfg.baseline, None)?,
        SolverKind::Fista => fista_solve(inst, cache, &cfg.baseline, None)?,
        SolverKind::Oracle => {
            let x = sign_pattern_oracle(inst, cache)?;
            let r = fixed_point_residual(inst, cache, &x);
            SolveResult {
                x,
                status: SolveStatus::Converged,
                steps_taken: 0,
                final_residual: r,
                time: 0.0,
                step_size: 0.0,
                trajectory: None,
            }
        }
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    let certificate = certify(inst, cache, &result.x, cfg.certify_tol);
    Ok(SolverOutcome {
        solver: kind,
        status: result.status,
        steps_taken: result.steps_taken,
        final_residual: result.final_residual,
        objective: primal_objective(inst, &result.x),
        nonzeros: result
            .x
            .iter()
            .filter(|v| v.abs() > cfg.certify_tol)
            .count(),
        pseudo_time: result.time,
        step_size: result.step_size,
        wall_seconds,
        certified: result.status == SolveStatus::Converged && certificate.passed,
        result,
        certificate,
    })
}

fn solver_config_json(kind: SolverKind, cfg: &RunConfig) -> Value {
    match kind {
        SolverKind::Neural => json!({ "neural": cfg.neural, "certify_tol": cfg.certify_tol }),
        SolverKind::Ista | SolverKind::Fista => {
            json!({ "baseline": cfg.baseline, "certify_tol": cfg.certify_tol })
        }
        SolverKind::Oracle => json!({ "certify_tol": cfg.certify_tol }),
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub version: String,
    pub command: String,
    pub solver: SolverKind,
    pub seed: Option<u64>,
    pub instance: Option<String>,
    pub spec: Option<ExperimentSpec>,
    pub gram_mode: GramMode,
    pub config: Value,
    pub summary: SolverOutcome,
    pub certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery: Option<RecoveryReport>,
    pub wall_seconds: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    pub support_threshold: f64,
    pub lasso: RecoveryMetrics,
    pub least_norm: RecoveryMetrics,
}

fn write_trajectory(path: &Path, result: &SolveResult) -> Result<()> {
    let tr = result
        .trajectory
        .as_ref()
        .context("no trajectory was recorded")?;
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    tr.write_csv(std::io::BufWriter::new(file))?;
    Ok(())
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<i32> {
    let mut spec: ExperimentSpec = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    for w in spec.warnings() {
        eprintln!("warning: {w}");
    }
    let g = generate(&spec)?;
    fs::create_dir_all(&args.output)?;
    let fmt: MatrixFormat = args.format.into();
    let name = |stem: &str| format!("{stem}.{}", fmt.extension());
    io::save_matrix(args.output.join(name("A")), &g.a, fmt)?;
    io::save_vector(args.output.join(name("b")), &g.b, fmt)?;
    io::save_vector(args.output.join(name("x0")), &g.x0, fmt)?;
    let meta = InstanceMeta {
        n: spec.n,
        l: spec.l,
        lambda: g.lambda,
        a: name("A"),
        b: name("b"),
        x0: Some(name("x0")),
        seed: Some(spec.seed),
        spec: Some(spec.clone()),
        version: Some(VERSION.to_string()),
    };
    write_json(Some(&args.output.join(INSTANCE_FILE)), &meta)?;
    eprintln!(
        "generated {}x{} instance with {} spikes, lambda = {:e}, seed {} -> {}",
        spec.n,
        spec.l,
        spec.spikes,
        g.lambda,
        spec.seed,
        args.output.display()
    );
    Ok(EXIT_OK)
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32> {
    let start = Instant::now();
    let mut cfg = RunConfig::load(args.opts.config.as_deref(), args.opts.tol)?;
    if args.trajectory.is_some() {
        cfg.neural.record_trajectory = true;
        cfg.baseline.record_trajectory = true;
    }
    let mode = gram_mode(args.opts.matrix_free);
    let li = load_instance(&args.instance, mode)?;
    let monitor = if args.lyapunov && args.solver == SolverKind::Neural {
        Some(LyapunovMonitor::for_instance(&li.inst, &li.cache)?)
    } else {
        None
    };
    let outcome = run_solver(args.solver, &li.inst, &li.cache, &cfg, monitor.as_ref())?;
    if let Some(p) = &args.trajectory {
        write_trajectory(p, &outcome.result)?;
    }
    if let Some(p) = &args.solution {
        io::save_vector(p, &outcome.result.x, format_for(p))?;
    }
    let recovery = li.x0.as_ref().map(|x0| RecoveryReport {
        support_threshold: 0.5,
        lasso: recovery_metrics(x0, &outcome.result.x, 0.5),
        least_norm: recovery_metrics(x0, &least_norm_solution(li.inst.a(), li.inst.b()), 0.5),
    });
    let code = exit_code(&outcome);
    let report = RunReport {
        version: VERSION.to_string(),
        command: "solve".into(),
        solver: args.solver,
        seed: li.meta.seed,
        instance: Some(li.path.display().to_string()),
        spec: li.meta.spec.clone(),
        gram_mode: mode,
        config: solver_config_json(args.solver, &cfg),
        certificate: outcome.certificate.clone(),
        x: outcome.result.x.as_slice().to_vec(),
        summary: outcome,
        recovery,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(args.output.as_deref(), &report)?;
    Ok(code)
}

fn exit_code(outcome: &SolverOutcome) -> i32 {
    if outcome.certified {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    }
}

fn load_solution(path: &Path) -> Result<DVector<f64>> {
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let v: Value = read_json(path)?;
        let xs: Vec<f64> =
            serde_json::from_value(v.get("x").cloned().context("report has no \"x\" field")?)?;
        Ok(DVector::from_vec(xs))
    } else {
        Ok(io::load_vector(path)?)
    }
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<i32> {
    let li = load_instance(&args.instance, gram_mode(args.matrix_free))?;
    let x = load_solution(&args.solution)?;
    if x.len() != li.inst.cols() {
        bail!(
            "solution has length {} but the instance has {} columns",
            x.len(),
            li.inst.cols()
        );
    }
    let cert = certify(&li.inst, &li.cache, &x, args.tol);
    let report = json!({
        "version": VERSION,
        "command": "certify",
        "instance": li.path.display().to_string(),
        "objective": primal_objective(&li.inst, &x),
        "certificate": cert,
    });
    write_json(args.output.as_deref(), &report)?;
    Ok(if cert.passed {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    })
}

#[derive(Debug, Serialize)]
pub struct Disagreement {
    pub first: SolverKind,
    pub second: SolverKind,
    pub relative_gap: f64,
}

#[derive(Debug, Serialize)]
pub struct ComparisonReport {
    pub version: String,
    pub instance: String,
    pub seed: Option<u64>,
    pub config: RunConfig,
    pub disagreement_tol: f64,
    pub rows: Vec<SolverOutcome>,
    pub disagreements: Vec<Disagreement>,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn cmd_compare(args: &CompareArgs) -> Result<i32> {
    let mut solvers: Vec<SolverKind> = Vec::new();
    for &k in &args.solvers {
        if !solvers.contains(&k) {
            solvers.push(k);
        }
    }
    if solvers.len() < 2 {
        bail!("compare needs at least two distinct solvers");
    }
    let cfg = RunConfig::load(args.opts.config.as_deref(), args.opts.tol)?;
    let li = load_instance(&args.instance, gram_mode(args.opts.matrix_free))?;
    let rows = solvers
        .iter()
        .map(|&k| run_solver(k, &li.inst, &li.cache, &cfg, None))
        .collect::<Result<Vec<_>>>()?;

    let mut disagreements = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let gap = relative_gap(rows[i].objective, rows[j].objective);
            if gap > DISAGREEMENT_TOL {
                disagreements.push(Disagreement {
                    first: rows[i].solver,
                    second: rows[j].solver,
                    relative_gap: gap,
                });
            }
        }
    }
    if let Some(p) = &args.csv {
        let mut out =
            String::from("solver,status,objective,residual,iterations,wall_seconds,certified\n");
        for r in &rows {
            out += &format!(
                "{},{},{:e},{:e},{},{:e},{}\n",
                r.solver.name(),
                serde_json::to_value(r.status)?
                    .as_str()
                    .unwrap_or("unknown"),
                r.objective,
                r.final_residual,
                r.steps_taken,
                r.wall_seconds,
                r.certified
            );
        }
        fs::write(p, out).with_context(|| format!("writing {}", p.display()))?;
    }
    let all_certified = rows.iter().all(|r| r.certified);
    let code = if all_certified && disagreements.is_empty() {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    };
    let report = ComparisonReport {
        version: VERSION.to_string(),
        instance: li.path.display().to_string(),
        seed: li.meta.seed,
        config: cfg,
        disagreement_tol: DISAGREEMENT_TOL,
        rows,
        disagreements,
    };
    write_json(args.output.as_deref(), &report)?;
    Ok(code)
}

pub fn cmd_signal_recovery(args: &SignalRecoveryArgs) -> Result<i32> {
    let start = Instant::now();
    let mut spec: ExperimentSpec = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let mut cfg = match &args.solver_config {
        Some(_) => RunConfig::load(args.solver_config.as_deref(), args.tol)?,
        None => {
            // The row-sum bound is loose for orthonormal rows; estimate ‖AᵀA‖₂ instead.
            let mut c = RunConfig::load(None, args.tol)?;
            c.neural.step = StepRule::SpectralEstimate;
            c
        }
    };
    if args.trajectory.is_some() {
        cfg.neural.record_trajectory = true;
        cfg.neural.record_every = cfg.neural.record_every.max(10);
        cfg.baseline.record_trajectory = true;
    }
    let mode = gram_mode(args.matrix_free);
    let g = generate(&spec)?;
    let (inst, cache) = build_instance_with(g.a.clone(), g.b.clone(), g.lambda, mode)?;
    let outcome = run_solver(args.solver, &inst, &cache, &cfg, None)?;
    let least_norm = least_norm_solution(&g.a, &g.b);
    let recovery = RecoveryReport {
        support_threshold: args.support_threshold,
        lasso: recovery_metrics(&g.x0, &outcome.result.x, args.support_threshold),
        least_norm: recovery_metrics(&g.x0, &least_norm, args.support_threshold),
    };

    fs::create_dir_all(&args.output)?;
    let mut signals = String::from("index,x0,least_norm,recovered\n");
    for i in 0..spec.l {
        signals += &format!(
            "{i},{:?},{:?},{:?}\n",
            g.x0[i], least_norm[i], outcome.result.x[i]
        );
    }
    fs::write(args.output.join("signals.csv"), signals)?;
    if let Some(p) = &args.trajectory {
        write_trajectory(p, &outcome.result)?;
    }

    let code = exit_code(&outcome);
    let report = RunReport {
        version: VERSION.to_string(),
        command: "experiment signal-recovery".into(),
        solver: args.solver,
        seed: Some(spec.seed),
        instance: None,
        spec: Some(spec),
        gram_mode: mode,
        config: solver_config_json(args.solver, &cfg),
        certificate: outcome.certificate.clone(),
        x: outcome.result.x.as_slice().to_vec(),
        summary: outcome,
        recovery: Some(recovery),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(Some(&args.output.join("report.json")), &report)?;
    let r = report.recovery.as_ref().unwrap();
    eprintln!(
        "lasso: rel. error {:.4}, recall {:.3}, precision {:.3} | least-norm: rel. error {:.4} | certified: {}",
        r.lasso.relative_error,
        r.lasso.recall,
        r.lasso.precision,
        r.least_norm.relative_error,
        report.summary.certified
    );
    Ok(code)
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Experiment(ExperimentCommand::SignalRecovery(a)) => cmd_signal_recovery(a),
    }
}

/// Parse arguments and run, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(n) = neurolasso::linalg::configure_threads_from_env() {
        eprintln!("using {n} thread(s)");
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}
