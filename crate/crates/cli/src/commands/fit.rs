use std::path::Path;

use anyhow::{Context, Result};
use rssgeo::ingest::{
    fit_pathloss, normalize_rss, read_combined_csv, read_stream_csv, read_stream_index, remove_fast_fading,
    FilterParams,
};
use serde_json::json;

use super::{prepare_out, require_file};
use crate::args::FitArgs;
use crate::export::{sig6, write_json};
use crate::manifest::Stopwatch;

/// `(sensor_id, distance, representative RSS)`.
type SensorPoint = (usize, f64, f64);

/// One point per sensor from the chosen input, plus the filter used on raw streams.
fn load_points(args: &FitArgs) -> Result<(Vec<SensorPoint>, Option<FilterParams>)> {
    if let Some(path) = &args.data {
        require_file(path)?;
        let rows = read_combined_csv(path)?;
        return Ok((
            rows.iter().map(|r| (r.sensor_id, r.distance_m, r.rss_linear)).collect(),
            None,
        ));
    }
    let index = args.streams.as_ref().expect("clap requires one input");
    require_file(index)?;
    let base = index.parent().unwrap_or(Path::new("."));
    let params = FilterParams::default();
    let mut points = Vec::new();
    for entry in read_stream_index(index)? {
        let path = base.join(&entry.path);
        require_file(&path)?;
        let stream = read_stream_csv(&path, entry.sensor_id)?;
        let rss = remove_fast_fading(&stream, &params).with_context(|| format!("filtering {}", path.display()))?;
        points.push((entry.sensor_id, entry.distance_m, rss));
    }
    Ok((points, Some(params)))
}

pub fn fit(args: &FitArgs) -> Result<()> {
    let clock = Stopwatch::start();
    let (points, filter) = load_points(args)?;
    let rss: Vec<f64> = points.iter().map(|p| p.2).collect();
    let distances: Vec<f64> = points.iter().map(|p| p.1).collect();
    let normalized = normalize_rss(&rss, &distances)?;
    let pairs: Vec<(f64, f64)> = distances.iter().copied().zip(normalized).collect();
    let fit = fit_pathloss(&pairs, args.reference_distance)?;

    prepare_out(&args.out)?;
    write_json(
        &args.out.join("fit.json"),
        &json!({
            "n_hat": sig6(fit.n_hat),
            "sigma_db_hat": sig6(fit.sigma_db_hat),
            "k_hat": sig6(fit.k_hat),
            "count": fit.count,
            "reference_distance_m": args.reference_distance,
        }),
    )?;
    let config = json!({
        "data": args.data,
        "streams": args.streams,
        "filter": filter,
        "reference_distance_m": args.reference_distance,
    });
    write_json(&args.out.join("manifest.json"), &clock.manifest("fit", config, None))?;
    println!(
        "n = {}, sigma_dB = {}, K = {} from {} points",
        sig6(fit.n_hat),
        sig6(fit.sigma_db_hat),
        sig6(fit.k_hat),
        fit.count
    );
    Ok(())
}
