//! Command-line front end for the crisis-bargaining solver.
//!
//! [`run`] takes the argument vector and two writers so the whole surface
//! can be driven from tests; `main` only wires it to the process.

pub mod args;
pub mod config;
pub mod emit;
pub mod figure;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use crisis_bargain::classifier::{classify, comparative_static, GridError, Knob};
use crisis_bargain::engine::sim::{play_run, write_jsonl};
use crisis_bargain::engine::{analytic_payoffs, equilibrium_profile, simulate, EngineError, ProfileError, ProfileMode};
use crisis_bargain::oracle::{verify_period1, OracleError};
use crisis_bargain::params::DistributionError;
use crisis_bargain::thresholds::ThresholdSet;
use crisis_bargain::{BarrierDistribution, Violations};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use args::{Cli, Command, DistArg, FigureArgs, SimulateArgs, SweepArgs, VerifyArgs};
use config::{presets, resolve_params};

/// Environment variable naming the directory for relative output paths.
pub const OUT_DIR_VAR: &str = "CRISIS_BARGAIN_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("cannot use config {path}: {reason}")]
    Config { path: String, reason: String },
    #[error(transparent)]
    InvalidParams(#[from] Violations),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("cannot write {path}: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::UnknownPreset(_) => "unknown_preset",
            CliError::Config { .. } => "config",
            CliError::InvalidParams(_) => "invalid_params",
            CliError::Profile(ProfileError::InvalidParams(_)) => "invalid_params",
            CliError::Profile(_) => "profile_refused",
            CliError::Oracle(_) => "oracle",
            CliError::Engine(_) => "engine",
            CliError::Distribution(_) => "distribution",
            CliError::Grid(_) => "grid",
            CliError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let violations = match self {
            CliError::InvalidParams(v) | CliError::Profile(ProfileError::InvalidParams(v)) => Some(v),
            CliError::Grid(GridError::InvalidBase(v)) => Some(v),
            _ => None,
        };
        let mut value = json!({ "error": self.kind(), "message": self.to_string() });
        if let Some(v) = violations {
            value["violations"] = json!(v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        }
        value
    }
}

fn io_error(path: &Path, err: impl std::fmt::Display) -> CliError {
    CliError::Io { path: path.display().to_string(), reason: err.to_string() }
}

/// Where output files go: `out_dir` (normally from [`OUT_DIR_VAR`]) prefixes
/// relative paths.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub out_dir: Option<PathBuf>,
}

impl Context {
    pub fn from_env() -> Self {
        Context { out_dir: std::env::var_os(OUT_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from) }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    fn create(&self, path: &Path) -> Result<(PathBuf, BufWriter<File>), CliError> {
        let path = self.resolve(path);
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
        let file = File::create(&path).map_err(|e| io_error(&path, e))?;
        Ok((path, BufWriter::new(file)))
    }
}

/// Runs one command line with the process environment; returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_in(&Context::from_env(), argv, out, err)
}

pub fn run_in<I, T>(ctx: &Context, argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => return report(CliError::Usage(e.to_string().trim_end().to_string()), err),
    };
    match dispatch(ctx, cli.command, out) {
        Ok(code) => code,
        Err(e) => report(e, err),
    }
}

fn report(e: CliError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "{}", e.to_json());
    e.exit_code()
}

/// JSON to `-o` when given, otherwise to `out`.
fn emit_json<T: Serialize>(ctx: &Context, output: Option<&Path>, value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    match output {
        Some(path) => {
            let (path, mut file) = ctx.create(path)?;
            writeln!(file, "{text}").and_then(|_| file.flush()).map_err(|e| io_error(&path, e))
        }
        None => writeln!(out, "{text}").map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn dispatch(ctx: &Context, command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Thresholds(args) => {
            let params = resolve_params(&args)?;
            let t = ThresholdSet::compute(&params);
            let value = json!({ "params": params, "extension": t.extension.label(), "thresholds": t });
            emit_json(ctx, args.output.as_deref(), &value, out)?;
        }
        Command::Classify(args) => {
            let params = resolve_params(&args)?;
            let report = classify(&params)?;
            let t = ThresholdSet::compute(&params);
            let value = json!({
                "params": params,
                "label": report.label(),
                "efficient": report.efficient_peace_exists,
                "inefficient": report.inefficient_peace_exists,
                "war": report.war_inevitable,
                "extension": t.extension.label(),
                "report": report,
                "thresholds": t,
            });
            emit_json(ctx, args.output.as_deref(), &value, out)?;
        }
        Command::Sweep(args) => sweep(ctx, args, out)?,
        Command::Figure(args) => figure(ctx, args, out)?,
        Command::Simulate(args) => simulate_cmd(ctx, args, out)?,
        Command::Verify(args) => return verify(ctx, args, out),
        Command::Presets(args) => {
            let list: Vec<_> = presets()
                .into_iter()
                .map(|p| json!({ "name": p.name, "annotation": p.annotation, "params": p.params, "valid": p.params.is_valid() }))
                .collect();
            emit_json(ctx, args.output.as_deref(), &list, out)?;
        }
    }
    Ok(0)
}

fn sweep_values(args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    match (&args.values, args.from, args.to) {
        (Some(values), _, _) if !values.is_empty() => Ok(values.clone()),
        (_, Some(from), Some(to)) => {
            if args.steps < 2 {
                return Err(CliError::Usage("--steps must be at least 2".into()));
            }
            let n = args.steps - 1;
            Ok((0..=n).map(|i| from + (to - from) * i as f64 / n as f64).collect())
        }
        _ => Err(CliError::Usage("sweep needs --values or --from/--to".into())),
    }
}

fn sweep(ctx: &Context, args: SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let knob: Knob = args.knob.parse().map_err(|e: crisis_bargain::classifier::UnknownKnob| CliError::Usage(e.to_string()))?;
    // the base itself may be invalid only in the swept field
    let base = config::layered_params(&args.params)?;
    let values = sweep_values(&args)?;
    let points = comparative_static(&base, knob, &values);
    if args.json {
        return emit_json(ctx, args.params.output.as_deref(), &json!({ "knob": knob.name(), "points": points }), out);
    }
    let mut buf = Vec::new();
    emit::write_sweep_csv(knob.name(), &points, &mut buf).map_err(|e| io_error(Path::new("<csv>"), e))?;
    write_bytes(ctx, args.params.output.as_deref(), &buf, out)
}

fn write_bytes(ctx: &Context, output: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let (path, mut file) = ctx.create(path)?;
            file.write_all(bytes).and_then(|_| file.flush()).map_err(|e| io_error(&path, e))
        }
        None => out.write_all(bytes).map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn figure(ctx: &Context, args: FigureArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.cells == 0 {
        return Err(CliError::Usage("--cells must be positive".into()));
    }
    let base = resolve_params(&args.params)?;
    let svg_path = args.params.output.clone().unwrap_or_else(|| PathBuf::from(format!("{}.svg", args.figure.name())));
    let spec = figure::spec(args.figure, &base, svg_path, args.csv, args.cells, args.c_r_max, args.c_d_max);
    let panels = figure::panels(&spec, args.figure)?;

    let (svg_path, mut file) = ctx.create(&spec.svg)?;
    file.write_all(figure::render_svg(&panels).as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| io_error(&svg_path, e))?;
    let mut written = vec![svg_path.display().to_string()];
    for (panel, path) in panels.iter().zip(&spec.csv) {
        let (path, file) = ctx.create(path)?;
        emit::write_region_csv(&panel.grid, file).map_err(|e| io_error(&path, e))?;
        written.push(path.display().to_string());
    }
    let boundaries: Vec<_> = panels.iter().map(|p| json!({ "title": p.title, "boundaries": p.grid.boundaries })).collect();
    let summary = json!({ "figure": spec, "panels": boundaries, "written": written });
    writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("summary serializes"))
        .map_err(|e| io_error(Path::new("<stdout>"), e))
}

fn distribution(args: &SimulateArgs, mu: f64) -> Result<BarrierDistribution, CliError> {
    let dist = match args.dist {
        DistArg::Degenerate => BarrierDistribution::degenerate(mu)?,
        DistArg::Uniform => BarrierDistribution::uniform_around(mu, args.spread.unwrap_or(mu.min(1.0 - mu)))?,
        DistArg::Beta => BarrierDistribution::beta_with_mean(mu, args.concentration)?,
    };
    dist.check_mean(mu)?;
    Ok(dist)
}

fn simulate_cmd(ctx: &Context, args: SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = resolve_params(&args.params)?;
    let mode = ProfileMode::from(args.mode);
    let profile = equilibrium_profile(&params, mode)?;
    let dist = distribution(&args, params.mu)?;
    let stats = simulate(&profile, &params, &dist, args.horizon, args.runs, args.seed)?;
    let analytic = analytic_payoffs(&params, mode)?;
    if let Some(path) = &args.trace {
        let game = play_run(&profile, &params, &dist, stats.horizon, args.seed, 0)?;
        let (path, mut file) = ctx.create(path)?;
        write_jsonl(&mut file, 0, game.history()).and_then(|_| file.flush()).map_err(|e| io_error(&path, e))?;
    }
    let value = json!({
        "params": params,
        "mode": mode.as_str(),
        "distribution": dist.kind(),
        "stats": stats,
        "analytic": analytic,
    });
    emit_json(ctx, args.params.output.as_deref(), &value, out)
}

/// Exit status 3 signals a failed check under `--strict`.
fn verify(ctx: &Context, args: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = resolve_params(&args.params)?;
    let report = verify_period1(&params, args.mode.into(), args.grid, args.tol)?;
    emit_json(ctx, args.params.output.as_deref(), &json!({ "params": params, "report": report }), out)?;
    Ok(if args.strict && !report.pass { 3 } else { 0 })
}

/// Convenience for tests: runs and captures both streams as strings.
pub fn run_captured<I, T>(ctx: &Context, argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_in(ctx, argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

