use std::fmt::Write as _;

use anyhow::{bail, Result};
use rssgeo::experiment::{self, solver_config};
use rssgeo::noise::Seed;
use serde::Serialize;
use serde_json::json;

use super::{load_scenario, prepare_out};
use crate::args::SimulateArgs;
use crate::export::{grid_csv, grid_pgm, power_shade, write_json, write_text};
use crate::manifest::Stopwatch;
use crate::PartialFailure;

#[derive(Serialize)]
struct RecoveredPoint {
    index: usize,
    x: f64,
    y: f64,
    power: f64,
}

#[derive(Serialize)]
struct TrialOut {
    trial: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    support: Option<Vec<RecoveredPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    terminated_by: Option<rssgeo::solver::Termination>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn simulate_recover(args: &SimulateArgs) -> Result<()> {
    let clock = Stopwatch::start();
    let scenario = load_scenario(&args.common)?;
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let seed = Seed(args.common.seed);
    let run = experiment::simulate_recover(&scenario, args.trials, seed)?;
    let out = &args.common.out;
    prepare_out(out)?;

    let grid = &scenario.grid;
    let map: Vec<Option<f64>> = run.mean_power.iter().copied().map(Some).collect();
    write_text(&out.join("power_map.csv"), &grid_csv(grid, "mean_power", &map))?;
    std::fs::write(out.join("power_map.pgm"), grid_pgm(grid, &map, power_shade))?;

    let mut emitters = String::from("emitter,x,y,true_power,mean_recovered_power,location_rate\n");
    for (k, e) in run.emitters.iter().enumerate() {
        writeln!(
            emitters,
            "{},{},{},{},{},{}",
            k + 1,
            e.position_m.x,
            e.position_m.y,
            e.true_power,
            e.mean_recovered_power,
            e.location_rate
        )?;
    }
    write_text(&out.join("emitters.csv"), &emitters)?;

    let trials: Vec<TrialOut> = run
        .trials
        .iter()
        .map(|t| match &t.solution {
            Some(s) => TrialOut {
                trial: t.trial,
                support: Some(
                    s.support
                        .iter()
                        .zip(&s.powers)
                        .map(|(&index, &power)| {
                            let p = grid.point(index);
                            RecoveredPoint {
                                index,
                                x: p.x,
                                y: p.y,
                                power,
                            }
                        })
                        .collect(),
                ),
                residual_norm: Some(s.residual_norm),
                iterations: Some(s.iterations),
                terminated_by: Some(s.terminated_by),
                error: None,
            },
            None => TrialOut {
                trial: t.trial,
                support: None,
                residual_norm: None,
                iterations: None,
                terminated_by: None,
                error: t.error.clone(),
            },
        })
        .collect();
    write_json(&out.join("trials.json"), &trials)?;

    let failed = run.failed_trials();
    write_json(
        &out.join("summary.json"),
        &json!({
            "trials": args.trials,
            "succeeded": run.succeeded(),
            "failed_trials": failed,
            "emitters": run.emitters,
            "power_match_radius_m": experiment::POWER_MATCH_RADIUS_M,
            "location_radius_m": experiment::LOCATION_RADIUS_M,
        }),
    )?;
    let config = json!({ "scenario": scenario, "solver": solver_config(&scenario) });
    write_json(
        &out.join("manifest.json"),
        &clock.manifest("simulate-recover", config, Some((seed, args.trials))),
    )?;

    for (k, e) in run.emitters.iter().enumerate() {
        println!(
            "emitter {} at ({}, {}): mean power {:.4}, located in {:.1}% of trials",
            k + 1,
            e.position_m.x,
            e.position_m.y,
            e.mean_recovered_power,
            100.0 * e.location_rate
        );
    }
    if !failed.is_empty() {
        return Err(PartialFailure { failed }.into());
    }
    Ok(())
}
