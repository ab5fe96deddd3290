use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use rssgeo::analysis::{
    monte_carlo_resolution, prob_correct_assignment, resolution_map, ResolutionQuery, QUADRATURE_BUDGET,
    QUADRATURE_TOLERANCE,
};
use rssgeo::noise::Seed;
use rssgeo::scene::{Point, Scenario};
use serde_json::json;

use super::{load_scenario, prepare_out};
use crate::args::ResolutionArgs;
use crate::export::{grid_csv, grid_pgm, probability_shade, sensor_layout_hash, write_json, write_text};
use crate::manifest::Stopwatch;

pub fn resolution(args: &ResolutionArgs) -> Result<()> {
    let clock = Stopwatch::start();
    let scenario = load_scenario(&args.common)?;
    let anchor = args
        .anchor
        .or(scenario.anchor_m)
        .ok_or_else(|| anyhow!("no anchor: pass --anchor X,Y or set anchor_m in the scenario"))?;
    let target = args.target.or(scenario.target_m);
    prepare_out(&args.common.out)?;
    match target {
        Some(target) if !args.field => table(args, &scenario, anchor, target, clock),
        _ => field(args, &scenario, anchor, target, clock),
    }
}

fn table(args: &ResolutionArgs, scenario: &Scenario, anchor: Point, target: Point, clock: Stopwatch) -> Result<()> {
    let sigmas = if args.sigmas.is_empty() {
        vec![scenario.sigma_db]
    } else {
        args.sigmas.clone()
    };
    let counts = if args.sensor_counts.is_empty() {
        vec![scenario.sensors.len()]
    } else {
        args.sensor_counts.clone()
    };
    let seed = Seed(args.common.seed);
    let mut csv = String::from("sigma_db,sensors,p_analytic,p_mc,status\n");
    println!(
        "{:>8} {:>7} {:>10} {:>10}  status",
        "sigma_db", "sensors", "analytic", "mc"
    );
    for &m in &counts {
        let sensors = scenario.sensors.prefix(m)?;
        for &sigma_db in &sigmas {
            let query = ResolutionQuery {
                q1: anchor,
                q2: target,
                sensors: &sensors,
                model: &scenario.model,
                sigma_db,
            };
            let (analytic, status) = match prob_correct_assignment(&query) {
                Ok(p) => (Some(p), "ok".to_string()),
                Err(e) => (None, format!("failed: {e}")),
            };
            let mc = if args.trials > 0 {
                Some(monte_carlo_resolution(&query, args.trials, seed)?)
            } else {
                None
            };
            let show = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
            writeln!(csv, "{sigma_db},{m},{},{},{status}", show(analytic), show(mc))?;
            println!(
                "{sigma_db:>8} {m:>7} {:>10} {:>10}  {status}",
                analytic.map_or("-".into(), |v| format!("{v:.4}")),
                mc.map_or("-".into(), |v| format!("{v:.4}"))
            );
        }
    }
    let out = &args.common.out;
    write_text(&out.join("resolution_table.csv"), &csv)?;
    let config = json!({
        "scenario": scenario,
        "anchor_m": anchor,
        "target_m": target,
        "sigmas_db": sigmas,
        "sensor_counts": counts,
        "mc_trials": args.trials,
        "quadrature_tolerance": QUADRATURE_TOLERANCE,
    });
    let trials = (args.trials > 0).then_some((seed, args.trials));
    write_json(
        &out.join("manifest.json"),
        &clock.manifest("resolution", config, trials),
    )
}

fn field(
    args: &ResolutionArgs,
    scenario: &Scenario,
    anchor: Point,
    probe: Option<Point>,
    clock: Stopwatch,
) -> Result<()> {
    let sigma_db = scenario.sigma_db;
    let f = resolution_map(anchor, &scenario.grid, &scenario.sensors, &scenario.model, sigma_db);
    let out = &args.common.out;
    write_text(
        &out.join("resolution_field.csv"),
        &grid_csv(&scenario.grid, "p_correct", &f.values),
    )?;
    std::fs::write(
        out.join("resolution_field.pgm"),
        grid_pgm(&scenario.grid, &f.values, probability_shade),
    )?;
    let failures = f.failures();
    write_json(
        &out.join("resolution_field.json"),
        &json!({
            "anchor_m": anchor,
            "sigma_db": sigma_db,
            "sensors": scenario.sensors.len(),
            "sensor_layout_sha256": sensor_layout_hash(&scenario.sensors),
            "quadrature_tolerance": QUADRATURE_TOLERANCE,
            "quadrature_budget": QUADRATURE_BUDGET,
            "failed_cells": failures,
            "cells_below_half": f.below_half(),
        }),
    )?;
    let config = json!({ "scenario": scenario, "anchor_m": anchor });
    write_json(&out.join("manifest.json"), &clock.manifest("resolution", config, None))?;
    println!(
        "resolution field around ({}, {}): {} cells, {} quadrature failures",
        anchor.x,
        anchor.y,
        f.values.len(),
        failures.len()
    );
    if let Some(p) = probe {
        match f.value_at(&p) {
            Some(v) => println!("P at ({}, {}) = {v:.4}", p.x, p.y),
            None => println!("P at ({}, {}) unavailable", p.x, p.y),
        }
    }
    Ok(())
}
