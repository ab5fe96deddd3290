//! Seeded Monte Carlo recovery runs: simulate noisy data, recover with BLOOMP,
//! and aggregate per grid cell and per true emitter.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::noise::{simulate_noisy_data_with, Seed};
use crate::scene::{build_measurement_matrix, CandidateGrid, Point, Scenario};
use crate::solver::{PursuitSolver, SolverConfig, SparseSolution, Strategy};

/// Recovered power within this distance of a true emitter is credited to it.
pub const POWER_MATCH_RADIUS_M: f64 = 5.0;
/// A true emitter counts as located if some support point lies this close.
pub const LOCATION_RADIUS_M: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<SparseSolution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterSummary {
    pub position_m: Point,
    pub true_power: f64,
    /// Mean over successful trials of the power credited to this emitter.
    pub mean_recovered_power: f64,
    /// Fraction of successful trials with a support point within the location radius.
    pub location_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRun {
    pub seed: Seed,
    pub trials: Vec<TrialRecord>,
    /// Per-cell recovered power averaged over successful trials.
    pub mean_power: Vec<f64>,
    pub emitters: Vec<EmitterSummary>,
}

impl RecoveryRun {
    pub fn failed_trials(&self) -> Vec<u64> {
        self.trials
            .iter()
            .filter(|t| t.solution.is_none())
            .map(|t| t.trial)
            .collect()
    }

    pub fn succeeded(&self) -> usize {
        self.trials.iter().filter(|t| t.solution.is_some()).count()
    }
}

/// Solver settings for a scenario: its own block, or defaults stopping at its noise level.
pub fn solver_config(scenario: &Scenario) -> SolverConfig {
    scenario
        .solver
        .clone()
        .unwrap_or_else(|| SolverConfig::default().with_sigma_db(scenario.sigma_db))
}

/// Nearest true emitter to `p` within `radius`, if any.
fn nearest_emitter(positions: &[Point], p: &Point, radius: f64) -> Option<usize> {
    positions
        .iter()
        .enumerate()
        .map(|(k, e)| (k, e.distance_to(p)))
        .filter(|&(_, d)| d <= radius)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
}

/// Power credited to each true emitter and whether each was located, for one solution.
pub fn match_emitters(grid: &CandidateGrid, positions: &[Point], solution: &SparseSolution) -> (Vec<f64>, Vec<bool>) {
    let mut power = vec![0.0; positions.len()];
    let mut located = vec![false; positions.len()];
    for (&i, &p) in solution.support.iter().zip(&solution.powers) {
        let q = grid.point(i);
        if let Some(k) = nearest_emitter(positions, &q, POWER_MATCH_RADIUS_M) {
            power[k] += p;
        }
        for (k, e) in positions.iter().enumerate() {
            if e.distance_to(&q) <= LOCATION_RADIUS_M {
                located[k] = true;
            }
        }
    }
    (power, located)
}

/// Runs `trials` independent noisy realizations of the scenario. Trials run in
/// parallel on substreams of `seed` and are reported in trial order.
pub fn simulate_recover(scenario: &Scenario, trials: u64, seed: Seed) -> Result<RecoveryRun> {
    scenario.validate()?;
    let recovery = scenario.recovery_model()?;
    let matrix = build_measurement_matrix(&scenario.grid, &scenario.sensors, &recovery)?;
    let solver = PursuitSolver::new(&matrix, solver_config(scenario), Strategy::Bloomp)?;

    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let outcome = simulate_noisy_data_with(
                &scenario.emitters,
                &scenario.sensors,
                &scenario.model,
                scenario.sigma_db,
                &mut seed.trial_rng(trial),
            )
            .and_then(|d| solver.solve(&d));
            match outcome {
                Ok(solution) => TrialRecord {
                    trial,
                    solution: Some(solution),
                    error: None,
                },
                Err(e) => TrialRecord {
                    trial,
                    solution: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let n = scenario.grid.len();
    let positions: Vec<Point> = scenario.emitters.iter().map(|e| e.position_m).collect();
    let mut mean_power = vec![0.0; n];
    let mut credited = vec![0.0; positions.len()];
    let mut located = vec![0usize; positions.len()];
    let mut ok = 0usize;
    for solution in records.iter().filter_map(|r| r.solution.as_ref()) {
        ok += 1;
        for (&i, &p) in solution.support.iter().zip(&solution.powers) {
            mean_power[i] += p;
        }
        let (power, found) = match_emitters(&scenario.grid, &positions, solution);
        for k in 0..positions.len() {
            credited[k] += power[k];
            located[k] += found[k] as usize;
        }
    }
    let denom = ok.max(1) as f64;
    mean_power.iter_mut().for_each(|v| *v /= denom);
    let emitters = scenario
        .emitters
        .iter()
        .enumerate()
        .map(|(k, e)| EmitterSummary {
            position_m: e.position_m,
            true_power: e.power,
            mean_recovered_power: credited[k] / denom,
            location_rate: located[k] as f64 / denom,
        })
        .collect();
    Ok(RecoveryRun {
        seed,
        trials: records,
        mean_power,
        emitters,
    })
}
