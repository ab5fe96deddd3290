//! File writers. Numbers use Rust's shortest round-trip formatting so output
//! is byte-identical across reruns.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rssgeo::scene::{CandidateGrid, SensorArray};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// `x,y,<column>` rows over the grid, x fastest.
pub fn grid_csv(grid: &CandidateGrid, column: &str, values: &[Option<f64>]) -> String {
    let mut out = format!("index,x,y,{column}\n");
    for (i, v) in values.iter().enumerate() {
        let p = grid.point(i);
        match v {
            Some(v) => writeln!(out, "{i},{},{},{v}", p.x, p.y),
            None => writeln!(out, "{i},{},{},", p.x, p.y),
        }
        .expect("writing to a String");
    }
    out
}

/// Binary greyscale image of grid values, north up. `shade` maps a value to
/// 0 (black) ..= 255 (white); missing values are drawn black.
pub fn grid_pgm(grid: &CandidateGrid, values: &[Option<f64>], shade: impl Fn(f64) -> u8) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    for iy in (0..grid.ny).rev() {
        for ix in 0..grid.nx {
            out.push(values[grid.index(ix, iy)].map_or(0, &shade));
        }
    }
    out
}

/// White for zero power, black for power one or more.
pub fn power_shade(v: f64) -> u8 {
    (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8
}

/// Black for probability 0, white for probability 1.
pub fn probability_shade(v: f64) -> u8 {
    (255.0 * v.clamp(0.0, 1.0)).round() as u8
}

/// Hex SHA-256 of the altitude and sensor coordinates as little-endian f64.
pub fn sensor_layout_hash(sensors: &SensorArray) -> String {
    let mut h = Sha256::new();
    h.update(sensors.altitude_m.to_le_bytes());
    for p in &sensors.positions_m {
        h.update(p.x.to_le_bytes());
        h.update(p.y.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Rounds to six significant digits for reports.
pub fn sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.5e}").parse().expect("formatted float parses")
}
