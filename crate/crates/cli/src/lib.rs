//! Experiment harness behind the `rssgeo` binary.

pub mod args;
pub mod commands;
pub mod export;
pub mod manifest;

use std::fmt;
use std::path::PathBuf;

pub use args::Cli;

/// A required input file does not exist (exit code 2).
#[derive(Debug)]
pub struct MissingInput(pub PathBuf);

impl fmt::Display for MissingInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "input file not found: {}", self.0.display())
    }
}

impl std::error::Error for MissingInput {}

/// Some Monte Carlo trials failed; outputs cover the remaining ones.
#[derive(Debug)]
pub struct PartialFailure {
    pub failed: Vec<u64>,
}

impl fmt::Display for PartialFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} trial(s) failed: {:?}", self.failed.len(), self.failed)
    }
}

impl std::error::Error for PartialFailure {}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    commands::dispatch(&cli.command)
}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<MissingInput>().is_some() {
        2
    } else {
        1
    }
}

/// Sizes the global worker pool from `RSSGEO_THREADS`, if set.
pub fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("RSSGEO_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|e| anyhow::anyhow!("RSSGEO_THREADS={v:?}: {e}"))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
    }
    Ok(())
}
