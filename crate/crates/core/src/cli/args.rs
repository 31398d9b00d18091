use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{LogBase, ProtocolPreset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qkdlab", version, about = "Security analysis and simulation of entanglement-based qutrit key distribution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format (defaults to csv for sweep, json otherwise)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Omit the timestamp from JSON output
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// States of the four optimal phi-bases (or one basis by phase)
    Bases(BasesArgs),
    /// Fidelities and information figures of one cloner
    ClonerEval(ClonerEvalArgs),
    /// Bob/Eve information crossing for a preset
    Crossing(CrossingArgs),
    /// Symmetric cloner with equal fidelities for Bob and Eve
    Symmetric(SymmetricArgs),
    /// Visibility and fidelity thresholds
    Thresholds,
    /// Acceptable error rates of all presets
    Table(TableArgs),
    /// Monte-Carlo protocol session
    Simulate(SimulateArgs),
    /// Which basis pairs are perfectly correlated
    Survey(SurveyArgs),
    /// Information curves over a fidelity grid or explicit cloners
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bases(_) => "bases",
            Command::ClonerEval(_) => "cloner-eval",
            Command::Crossing(_) => "crossing",
            Command::Symmetric(_) => "symmetric",
            Command::Thresholds => "thresholds",
            Command::Table(_) => "table",
            Command::Simulate(_) => "simulate",
            Command::Survey(_) => "survey",
            Command::Sweep(_) => "sweep",
        }
    }
}

fn parse_log_base(s: &str) -> Result<LogBase, String> {
    s.parse().map_err(|e: crate::QkdError| e.to_string())
}

fn parse_preset(s: &str) -> Result<ProtocolPreset, String> {
    s.parse().map_err(|e: crate::QkdError| e.to_string())
}

#[derive(Debug, Args, Serialize)]
pub struct BasesArgs {
    /// Single basis with this phase instead of the four optimal ones
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Complex-conjugate basis
    #[arg(long)]
    pub conjugate: bool,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ClonerEvalArgs {
    /// v,x,y or v,x,y,z
    #[arg(long, allow_hyphen_values = true, conflicts_with = "amplitudes", required_unless_present = "amplitudes")]
    pub params: Option<String>,
    /// JSON amplitude matrix file
    #[arg(long)]
    pub amplitudes: Option<PathBuf>,
    /// Rescale the parameters to unit norm
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, default_value = "2", value_parser = parse_log_base)]
    pub base: LogBase,
}

#[derive(Debug, Args, Serialize)]
pub struct CrossingArgs {
    #[arg(long, default_value = "3deb", value_parser = parse_preset)]
    pub preset: ProtocolPreset,
    #[arg(long, default_value = "2", value_parser = parse_log_base)]
    pub base: LogBase,
}

#[derive(Debug, Args, Serialize)]
pub struct SymmetricArgs {
    #[arg(long, default_value = "3deb", value_parser = parse_preset)]
    pub preset: ProtocolPreset,
}

#[derive(Debug, Args, Serialize)]
pub struct TableArgs {
    #[arg(long, default_value = "2", value_parser = parse_log_base)]
    pub base: LogBase,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// JSON session config; flags given explicitly override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rounds: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// ideal | depolarizing:V | clone:optimal | clone:v,x,y[,z]
    #[arg(long)]
    pub channel: Option<String>,
    /// Four comma-separated weights
    #[arg(long)]
    pub alice_weights: Option<String>,
    #[arg(long)]
    pub bob_weights: Option<String>,
    /// `same` or accepted pairs such as `0-0,1-3`
    #[arg(long)]
    pub sifting: Option<String>,
    #[arg(long, value_parser = parse_log_base)]
    pub base: Option<LogBase>,
    /// Also compare against the analytic values (cloning attack, >= 1e5 rounds)
    #[arg(long)]
    pub compare: bool,
    /// Write per-round records (round,basis_i,basis_j,a,b) as CSV
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SurveyArgs {
    #[arg(long, default_value_t = 100_000)]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Lowest F_A of the grid
    #[arg(long, conflicts_with = "point")]
    pub from: Option<f64>,
    /// Highest F_A of the grid
    #[arg(long, conflicts_with = "point")]
    pub to: Option<f64>,
    /// Number of grid points
    #[arg(long, conflicts_with = "point")]
    pub points: Option<usize>,
    /// Explicit cloner v,x,y (repeatable) instead of a grid
    #[arg(long, allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// Rescale explicit points to unit norm
    #[arg(long, requires = "point")]
    pub normalize: bool,
    #[arg(long, default_value = "2", value_parser = parse_log_base)]
    pub base: LogBase,
}
