use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sac", version, about = "Stochastic Allen-Cahn experiments")]
pub struct Cli {
    /// Cap on worker threads for concurrent experiment legs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Variance, correlation and sup norms of the mollified noise.
    NoiseStats(NoiseStatsArgs),
    /// Traveling-wave profile for a forcing `delta`.
    Wave(WaveArgs),
    /// One phase-field run with its interface radius over time.
    Simulate(SimulateArgs),
    /// Front radius under the limit law, the radial distance system or the eps front law.
    Flow(FlowArgs),
    /// Phase field against the radius law for every eps.
    Compare(ExperimentArgs),
    /// Integrated front drift against the Brownian path.
    Lemma2(ExperimentArgs),
    /// Ordering margins of the sub- and supersolution barriers.
    Sandwich(ExperimentArgs),
    /// All experiments merged into one report.
    Report(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct NoiseStatsArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, num_args = 1.., default_values_t = [0.1, 0.05, 0.025])]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    pub t_end: f64,
    /// Number of independent paths in the ensemble.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WaveArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long = "L", default_value_t = 20.0)]
    pub half_length: f64,
    #[arg(long, default_value_t = 4001)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Rect2d,
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0.04)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long = "R0", default_value_t = 0.5)]
    pub r0: f64,
    #[arg(long = "T", default_value_t = 0.05)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = GeometryArg::Radial)]
    pub geometry: GeometryArg,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub noise: Switch,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlowMode {
    Sde,
    Smbmc,
    Front,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
    Zero,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long, value_enum, default_value_t = FlowMode::Sde)]
    pub mode: FlowMode,
    #[arg(long, default_value_t = 0.04)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.5)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = SignArg::Zero)]
    pub sign: SignArg,
    /// Space dimension.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long = "R0", default_value_t = 0.5)]
    pub r0: f64,
    #[arg(long = "T", default_value_t = 0.05)]
    pub t_end: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Shared flags of the experiment subcommands; each one overrides the
/// matching field of `--config`.
#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "sac-out")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long = "N")]
    pub n_curv: Option<f64>,
    #[arg(long, num_args = 1..)]
    pub eps: Option<Vec<f64>>,
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    #[arg(long = "R0")]
    pub r0: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryArg>,
    #[arg(long, value_enum)]
    pub noise: Option<Switch>,
}
