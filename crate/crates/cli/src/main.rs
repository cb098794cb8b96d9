//! `shuttlecf`: GPS logs to calibrated car-following models.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "shuttlecf", version, about = "Car-following analysis and calibration for automated shuttles")]
struct Cli {
    /// Worker threads for simulation and calibration.
    #[arg(long, global = true, env = "CF_CALIB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive leader and follower kinematics from two GPS logs.
    Ingest(IngestArgs),
    /// Pair, filter and segment car-following data.
    Clean(CleanArgs),
    /// Descriptive statistics, normality, correlation and comfort shares.
    Stats(StatsArgs),
    /// Simulate the follower of every segment under one model.
    Simulate(SimulateArgs),
    /// Calibrate a model with the genetic algorithm and score a held-out split.
    Calibrate(CalibrateArgs),
    /// Score calibrated parameters on another set of segments.
    Validate(ValidateArgs),
    /// Render result files as text tables or SVG plots.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Leader log, CSV with header t,lat,lon.
    #[arg(long)]
    leader: PathBuf,
    /// Follower log, CSV with header t,lat,lon.
    #[arg(long)]
    follower: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CleanArgs {
    /// Output of `ingest`, or an already paired series.
    #[arg(long)]
    input: PathBuf,
    /// Cleaning thresholds, JSON; defaults apply to omitted fields.
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    segments: PathBuf,
    /// Jerk comfort thresholds, JSON.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Also write histograms of speed, acceleration, jerk and spacing here.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Model parameters, JSON tagged by "model".
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    model: Option<PathBuf>,
    /// Use the bundled calibrated parameters of a model instead.
    #[arg(long)]
    preset: Option<ModelChoice>,
    #[arg(long)]
    segments: PathBuf,
    /// Integration step, s.
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    /// Speed and acceleration limits, JSON.
    #[arg(long)]
    limits: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Also write observed-vs-simulated spacing and speed plots here.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelChoice {
    Idm,
    Blend,
    LinearAcc,
}

impl From<ModelChoice> for shuttlecf::ModelKind {
    fn from(m: ModelChoice) -> Self {
        match m {
            ModelChoice::Idm => shuttlecf::ModelKind::Idm,
            ModelChoice::Blend => shuttlecf::ModelKind::Blend,
            ModelChoice::LinearAcc => shuttlecf::ModelKind::LinearAcc,
        }
    }
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[arg(long, value_enum)]
    model: ModelChoice,
    #[arg(long)]
    segments: PathBuf,
    /// GA settings, limits, dt and model options, JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Share of samples used for calibration.
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
    /// Replace the configured GA seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Output of `calibrate`.
    #[arg(long)]
    result: PathBuf,
    #[arg(long)]
    segments: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Svg,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Result files from `stats`, `simulate` or `calibrate`.
    #[arg(long = "input", num_args = 0..)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Segments used for histograms in SVG output.
    #[arg(long)]
    segments: Option<PathBuf>,
    /// Text file, or directory for SVG output.
    #[arg(long)]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Ingest(a) => commands::ingest(&a),
        Command::Clean(a) => commands::clean(&a),
        Command::Stats(a) => commands::stats(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Calibrate(a) => commands::calibrate(&a),
        Command::Validate(a) => commands::validate(&a),
        Command::Report(a) => commands::report(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_line());
            ExitCode::from(1)
        }
    }
}
