use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rssgeo::analysis::DataNorm;
use rssgeo::scene::Point;

#[derive(Debug, Parser)]
#[command(name = "rssgeo", version, about = "Sparse RSS localization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo simulate-and-recover run with averaged power map.
    SimulateRecover(SimulateArgs),
    /// Resolution probability: (σ, M) table for a pair, or a field over the grid.
    Resolution(ResolutionArgs),
    /// Detectability thresholds over the grid or at one index.
    Clearance(ClearanceArgs),
    /// Pathloss exponent and shadowing fit from measured RSS.
    Fit(FitArgs),
    /// Shadowing noise moments and termination factors.
    Moments(MomentsArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Exponent assumed by the recovery, overriding the scenario.
    #[arg(long)]
    pub exponent_override: Option<f64>,
    /// Shadowing level overriding the scenario.
    #[arg(long)]
    pub sigma_db: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 500)]
    pub trials: u64,
}

#[derive(Debug, Args)]
pub struct ResolutionArgs {
    #[command(flatten)]
    pub common: Common,
    /// True emitter location (defaults to the scenario anchor).
    #[arg(long, value_parser = parse_point)]
    pub anchor: Option<Point>,
    /// Competing location; selects table mode (defaults to the scenario target).
    #[arg(long, value_parser = parse_point)]
    pub target: Option<Point>,
    /// Noise levels for table mode.
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Vec<f64>,
    /// Sensor counts for table mode; each uses the first M scenario sensors.
    #[arg(long, value_delimiter = ',')]
    pub sensor_counts: Vec<usize>,
    /// Monte Carlo trials per table row (0 skips the simulation column).
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Force field mode even when a target is available.
    #[arg(long)]
    pub field: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Euclidean,
    Supremum,
}

impl From<NormArg> for DataNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Euclidean => DataNorm::Euclidean,
            NormArg::Supremum => DataNorm::Supremum,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClearanceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Data-fit tolerance ε.
    #[arg(long)]
    pub epsilon: f64,
    /// Restrict to one grid index (zero-based).
    #[arg(long)]
    pub index: Option<usize>,
    #[arg(long, value_enum, default_value_t = NormArg::Euclidean)]
    pub norm: NormArg,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["data", "streams"])))]
pub struct FitArgs {
    /// CSV with columns sensor_id,distance_m,rss_linear.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// CSV with columns sensor_id,distance_m,path listing raw sample streams
    /// (time_s,rss_linear) to be filtered before fitting.
    #[arg(long)]
    pub streams: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub reference_distance: f64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 3.0, 4.0, 5.0])]
    pub sigmas: Vec<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub termination_c: f64,
    /// Write moments.csv here instead of printing only.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("bad x in {s:?}: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("bad y in {s:?}: {e}"))?;
    Ok(Point::new(x, y))
}
