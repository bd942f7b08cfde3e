use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crisis_bargain::engine::ProfileMode;

const LAYERING: &str = "\
Parameters are layered: command-line flags override the --config file, which \
overrides the --preset, which overrides the built-in defaults (the demo-b \
preset). Relative output paths are resolved against $CRISIS_BARGAIN_OUT_DIR \
when it is set.";

#[derive(Debug, Parser)]
#[command(name = "crisis-bargain", version, about = "Crisis bargaining with trade barriers", after_help = LAYERING)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form thresholds and indifference offers.
    Thresholds(ParamArgs),
    /// Which peaceful equilibria exist at one point.
    Classify(ParamArgs),
    /// Thresholds and labels along one parameter.
    Sweep(SweepArgs),
    /// Region figures over the cost plane (SVG plus CSV twin).
    Figure(FigureArgs),
    /// Monte Carlo payoffs of an equilibrium profile.
    Simulate(SimulateArgs),
    /// Period-1 deviation check of an equilibrium profile.
    Verify(VerifyArgs),
    /// List the shipped presets.
    Presets(OutputArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Named parameter set (see `presets`).
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON file with any subset of the parameter fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub h0: Option<f64>,
    #[arg(long = "c-r", allow_negative_numbers = true)]
    pub c_r: Option<f64>,
    #[arg(long = "c-d", allow_negative_numbers = true)]
    pub c_d: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Barrier removal needs both sides' consent.
    #[arg(long)]
    pub cooperative: bool,
    /// Write the report here instead of standard output.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// mu, p, p1, delta, h0, c_D, c_R, rho or theta.
    #[arg(long)]
    pub knob: String,
    /// Explicit comma-separated values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["from", "to"])]
    pub values: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true, requires = "to")]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "from")]
    pub to: Option<f64>,
    /// Points between --from and --to, endpoints included.
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Regions,
    MuShift,
    PShift,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Regions => "regions",
            FigureId::MuShift => "mu-shift",
            FigureId::PShift => "p-shift",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub figure: FigureId,
    #[command(flatten)]
    pub params: ParamArgs,
    /// CSV twin of the raster; defaults to the SVG path with a .csv extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Raster cells per axis.
    #[arg(long, default_value_t = 200)]
    pub cells: usize,
    /// Upper end of the c_R axis (chosen from the thresholds when omitted).
    #[arg(long = "c-r-max")]
    pub c_r_max: Option<f64>,
    /// Upper end of the c_D axis (chosen from the thresholds when omitted).
    #[arg(long = "c-d-max")]
    pub c_d_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Efficient,
    Inefficient,
    Cooperative,
}

impl From<ModeArg> for ProfileMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Efficient => ProfileMode::EfficientPeace,
            ModeArg::Inefficient => ProfileMode::InefficientPeace,
            ModeArg::Cooperative => ProfileMode::CooperativeInefficient,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Degenerate,
    Uniform,
    Beta,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "inefficient")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 10_000)]
    pub runs: u64,
    /// Periods per run; by default the tail beyond it is below 1e-8 of the surplus.
    #[arg(long)]
    pub horizon: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Distribution of the barrier value, always with mean mu.
    #[arg(long, value_enum, default_value = "degenerate")]
    pub dist: DistArg,
    /// Half width of the uniform distribution (default: widest that fits in [0, 1]).
    #[arg(long)]
    pub spread: Option<f64>,
    /// alpha + beta of the beta distribution.
    #[arg(long, default_value_t = 4.0)]
    pub concentration: f64,
    /// Write the trajectory of run 0 as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "inefficient")]
    pub mode: ModeArg,
    /// Offer grid intervals on [0, y].
    #[arg(long, default_value_t = crisis_bargain::oracle::DEFAULT_GRID)]
    pub grid: usize,
    /// Largest deviation gain still counted as no gain.
    #[arg(long, default_value_t = crisis_bargain::oracle::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Exit with status 3 when the check fails.
    #[arg(long)]
    pub strict: bool,
}
