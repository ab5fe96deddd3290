use std::time::Instant;

use rssgeo::noise::{Seed, RNG_IDENTITY};
use serde::Serialize;
use serde_json::Value;

/// Trial `k` draws from stream `k` of the seed.
#[derive(Debug, Clone, Serialize)]
pub struct TrialSeeds {
    pub seed: u64,
    pub first_stream: u64,
    pub count: u64,
}

/// Everything needed to reproduce a run. `wall_time_s` is the only field that
/// varies between identical reruns.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub rng: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<TrialSeeds>,
    pub config: Value,
    pub wall_time_s: f64,
}

pub struct Stopwatch(Instant);

impl Stopwatch {
    pub fn start() -> Self {
        Stopwatch(Instant::now())
    }

    pub fn manifest(&self, command: &str, config: Value, trials: Option<(Seed, u64)>) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_IDENTITY.to_string(),
            trials: trials.map(|(seed, count)| TrialSeeds {
                seed: seed.0,
                first_stream: 0,
                count,
            }),
            config,
            wall_time_s: self.0.elapsed().as_secs_f64(),
        }
    }
}
