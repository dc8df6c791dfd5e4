use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use predckpt::{FalseShape, LawKind, Seconds, Strategy, WindowLaw};

#[derive(Debug, Parser)]
#[command(
    name = "predckpt",
    version,
    about = "Periodic checkpointing with fault prediction: closed-form plans and simulations"
)]
pub struct Cli {
    /// TOML experiment file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for replicate runs (default: all cores).
    #[arg(long, global = true, env = "PREDCKPT_WORKERS", value_name = "N")]
    pub workers: Option<usize>,

    /// Directory for CSV files written without an explicit `--out`.
    #[arg(long, global = true, env = "PREDCKPT_OUT_DIR", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal periods and wastes of every strategy, capped and uncapped.
    Analyze(AnalyzeArgs),
    /// Simulate strategies and compare their makespans with Young's.
    Simulate(SimulateArgs),
    /// Simulated waste along one varying parameter.
    Sweep(SweepArgs),
    /// Export or import fault and prediction traces.
    #[command(subcommand)]
    Trace(TraceCommand),
}

/// Platform and predictor coordinates. List-valued flags take
/// comma-separated values.
#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// Processor counts.
    #[arg(long = "n", value_delimiter = ',', value_name = "N,...")]
    pub n_procs: Vec<u64>,
    /// Individual processor MTBF, e.g. 125y.
    #[arg(long, value_name = "DURATION")]
    pub mtbf_ind: Option<Seconds>,
    /// Checkpoint length.
    #[arg(long = "c", value_name = "DURATION")]
    pub ckpt: Option<Seconds>,
    /// Downtime after a fault.
    #[arg(long = "d", value_name = "DURATION")]
    pub down: Option<Seconds>,
    /// Recovery length.
    #[arg(long = "r-rec", value_name = "DURATION")]
    pub recovery: Option<Seconds>,
    /// Migration cost (enables the Migration model in `analyze`).
    #[arg(long, value_name = "DURATION")]
    pub migration: Option<Seconds>,
    #[arg(long, value_delimiter = ',', value_name = "R,...")]
    pub recall: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_name = "P,...")]
    pub precision: Vec<f64>,
    /// Prediction window lengths.
    #[arg(long, value_delimiter = ',', value_name = "DURATION,...")]
    pub window: Vec<Seconds>,
    /// Position of a predicted fault in its window: uniform, start or mean:<duration>.
    #[arg(long, value_name = "LAW")]
    pub window_law: Option<WindowLaw>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Fault laws: exp, uniform or weibull:<shape>. One CSV per law.
    #[arg(long = "law", value_delimiter = ',', value_name = "LAW,...")]
    pub laws: Vec<LawKind>,
    #[arg(long = "strategy", value_delimiter = ',', value_name = "NAME,...")]
    pub strategies: Vec<Strategy>,
    /// Replicates per point (default 100).
    #[arg(long, value_name = "N", conflicts_with = "fast")]
    pub reps: Option<usize>,
    /// Use 20 replicates.
    #[arg(long)]
    pub fast: bool,
    /// Base seed; replicate i uses a seed derived from it and i.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Fault-free compute time of the job.
    #[arg(long, value_name = "DURATION")]
    pub base_work: Option<Seconds>,
    /// Law of false-prediction inter-arrival times: same or uniform.
    #[arg(long, value_name = "SHAPE")]
    pub false_shape: Option<FalseShape>,
    /// CSV path; with several laws the law is appended to the file stem.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Validity cap factor: periods are limited to alpha times the mean time between events.
    #[arg(long, value_name = "ALPHA")]
    pub alpha: Option<f64>,
    /// Also write the plans as CSV rows.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Also run each strategy at its brute-force best period.
    #[arg(long)]
    pub best_period: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum TraceCommand {
    /// Generate a trace and write it as text.
    Export(ExportArgs),
    /// Read a trace, check it and print its statistics; optionally run a strategy on it.
    Import(ImportArgs),
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_name = "LAW")]
    pub law: Option<LawKind>,
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Events announced after this date are left out.
    #[arg(long, default_value = "30d", value_name = "DURATION")]
    pub horizon: Seconds,
    #[arg(long, value_name = "SHAPE")]
    pub false_shape: Option<FalseShape>,
    /// Collapse every window onto its fault date.
    #[arg(long)]
    pub exact_dates: bool,
    /// Output file (default: standard output).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    pub file: PathBuf,
    /// Run this strategy against the trace (continued from its seed past the horizon).
    #[arg(long, value_name = "NAME")]
    pub strategy: Option<Strategy>,
    #[arg(long = "d", default_value = "1mn", value_name = "DURATION")]
    pub down: Seconds,
    #[arg(long = "r-rec", default_value = "10mn", value_name = "DURATION")]
    pub recovery: Seconds,
    #[arg(long, value_name = "DURATION")]
    pub base_work: Option<Seconds>,
    /// Write the event log of the run to this file.
    #[arg(long, value_name = "FILE", requires = "strategy")]
    pub log: Option<PathBuf>,
}
