use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::RssSampleStream;
use crate::error::{Error, Result};

/// One row of a combined `sensor_id,distance_m,rss_linear` table.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct CombinedRow {
    pub sensor_id: usize,
    pub distance_m: f64,
    pub rss_linear: f64,
}

/// One row of a `sensor_id,distance_m,path` index of per-sensor stream files.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StreamEntry {
    pub sensor_id: usize,
    pub distance_m: f64,
    pub path: PathBuf,
}

#[derive(Debug, Deserialize)]
struct TimedSample {
    time_s: f64,
    rss_linear: f64,
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::InvalidParameter(format!("{}: {e}", path.display()))
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    reader
        .deserialize()
        .map(|row| row.map_err(|e| csv_error(path, e)))
        .collect()
}

pub fn read_combined_csv(path: impl AsRef<Path>) -> Result<Vec<CombinedRow>> {
    read_rows(path.as_ref())
}

pub fn read_stream_index(path: impl AsRef<Path>) -> Result<Vec<StreamEntry>> {
    read_rows(path.as_ref())
}

/// Reads a `time_s,rss_linear` table; the sample rate is taken from the mean
/// spacing of the timestamps.
pub fn read_stream_csv(path: impl AsRef<Path>, sensor_id: usize) -> Result<RssSampleStream> {
    let path = path.as_ref();
    let rows: Vec<TimedSample> = read_rows(path)?;
    if rows.len() < 2 {
        return Err(Error::EmptyStream);
    }
    let span = rows[rows.len() - 1].time_s - rows[0].time_s;
    let rate = (rows.len() - 1) as f64 / span;
    RssSampleStream::new(sensor_id, rate, rows.iter().map(|r| r.rss_linear).collect())
}
