use std::fmt::Write as _;

use anyhow::{bail, Result};
use rssgeo::analysis::{clearance_map, DataNorm};
use rssgeo::scene::build_measurement_matrix;
use serde_json::json;

use super::{load_scenario, prepare_out};
use crate::args::ClearanceArgs;
use crate::export::{write_json, write_text};
use crate::manifest::Stopwatch;

pub fn clearance(args: &ClearanceArgs) -> Result<()> {
    let clock = Stopwatch::start();
    let scenario = load_scenario(&args.common)?;
    let model = scenario.recovery_model()?;
    let matrix = build_measurement_matrix(&scenario.grid, &scenario.sensors, &model)?;
    let region: Vec<usize> = match args.index {
        Some(i) if i >= matrix.ncols() => bail!("--index {i} is outside the {}-point grid", matrix.ncols()),
        Some(i) => vec![i],
        None => (0..matrix.ncols()).collect(),
    };
    let norm = DataNorm::from(args.norm);
    let report = clearance_map(&matrix, &region, args.epsilon, norm)?;
    prepare_out(&args.common.out)?;

    let mut csv = String::from("index,x,y,column_norm,threshold\n");
    for (&i, &t) in report.region.iter().zip(&report.thresholds) {
        let p = scenario.grid.point(i);
        let n = match norm {
            DataNorm::Euclidean => matrix.column_norm(i),
            DataNorm::Supremum => matrix.column(i).amax(),
        };
        writeln!(csv, "{i},{},{},{n},{t}", p.x, p.y)?;
    }
    let out = &args.common.out;
    write_text(&out.join("clearance.csv"), &csv)?;
    let at = scenario.grid.point(report.argmax);
    write_json(
        &out.join("clearance.json"),
        &json!({
            "epsilon": report.epsilon,
            "norm": report.norm,
            "region_size": report.region.len(),
            "maximum": report.maximum,
            "argmax": report.argmax,
            "argmax_m": at,
        }),
    )?;
    let config = json!({ "scenario": scenario, "epsilon": args.epsilon, "index": args.index, "norm": norm });
    write_json(&out.join("manifest.json"), &clock.manifest("clearance", config, None))?;
    println!(
        "max threshold {:.6} at index {} ({}, {}) over {} point(s)",
        report.maximum,
        report.argmax,
        at.x,
        at.y,
        report.region.len()
    );
    Ok(())
}
