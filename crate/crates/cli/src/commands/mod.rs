mod clearance;
mod fit;
mod moments;
mod resolution;
mod simulate;

use std::path::Path;

use anyhow::{Context, Result};
use rssgeo::scene::Scenario;

use crate::args::{Command, Common};
use crate::MissingInput;

pub use clearance::clearance;
pub use fit::fit;
pub use moments::moments;
pub use resolution::resolution;
pub use simulate::simulate_recover;

pub fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::SimulateRecover(a) => simulate_recover(a),
        Command::Resolution(a) => resolution(a),
        Command::Clearance(a) => clearance(a),
        Command::Fit(a) => fit(a),
        Command::Moments(a) => moments(a),
    }
}

pub(crate) fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(MissingInput(path.to_path_buf()).into());
    }
    Ok(())
}

/// Loads the scenario and applies command-line overrides.
pub(crate) fn load_scenario(common: &Common) -> Result<Scenario> {
    require_file(&common.scenario)?;
    let mut scenario =
        Scenario::load(&common.scenario).with_context(|| format!("loading scenario {}", common.scenario.display()))?;
    if let Some(n) = common.exponent_override {
        scenario.assumed_exponent = Some(n);
    }
    if let Some(s) = common.sigma_db {
        scenario.sigma_db = s;
        if let Some(cfg) = scenario.solver.as_mut() {
            cfg.sigma_db = s;
        }
    }
    scenario.validate()?;
    Ok(scenario)
}

pub(crate) fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
