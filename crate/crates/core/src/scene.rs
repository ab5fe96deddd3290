//! Sensor geometry, candidate grid, pathloss model and the noiseless forward map.
//!
//! The measurement matrix has one row per sensor and one column per candidate
//! grid point, so that noiseless data is `d0 = Φ p0` with `p0` indexed by grid
//! point. Entry `(j, i)` is the power received at sensor `j` from a unit
//! reference-power emitter at grid point `i`: `k_ref · (r0 / r_ij)^n`.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SolverConfig;

/// Sensors closer than this are treated as coincident.
pub const COINCIDENT_SENSOR_TOLERANCE_M: f64 = 1e-9;

/// A point in the ground plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Power-law pathloss: `P = k_ref · p · (r0 / r)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathlossModel {
    pub exponent: f64,
    pub reference_distance_m: f64,
    #[serde(default = "default_reference_power")]
    pub reference_power: f64,
}

fn default_reference_power() -> f64 {
    1.0
}

impl PathlossModel {
    pub fn new(exponent: f64, reference_distance_m: f64) -> Result<Self> {
        Self::with_reference_power(exponent, reference_distance_m, 1.0)
    }

    pub fn with_reference_power(exponent: f64, reference_distance_m: f64, reference_power: f64) -> Result<Self> {
        let model = Self {
            exponent,
            reference_distance_m,
            reference_power,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pathloss exponent must be positive, got {}",
                self.exponent
            )));
        }
        if !(self.reference_distance_m > 0.0 && self.reference_distance_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "reference distance must be positive, got {}",
                self.reference_distance_m
            )));
        }
        if !(self.reference_power > 0.0 && self.reference_power.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "reference power must be positive, got {}",
                self.reference_power
            )));
        }
        Ok(())
    }

    /// Received power per unit reference power at range `r` (meters).
    pub fn gain(&self, r: f64) -> f64 {
        self.reference_power * (self.reference_distance_m / r).powf(self.exponent)
    }

    /// Same model with a different exponent, e.g. a deliberately wrong assumption.
    pub fn with_exponent(&self, exponent: f64) -> Result<Self> {
        Self::with_reference_power(exponent, self.reference_distance_m, self.reference_power)
    }
}

/// Sensors at known planar positions, all at a common altitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorArray {
    pub altitude_m: f64,
    pub positions_m: Vec<Point>,
}

impl SensorArray {
    pub fn new(positions_m: Vec<Point>, altitude_m: f64) -> Result<Self> {
        let array = Self {
            altitude_m,
            positions_m,
        };
        array.validate()?;
        Ok(array)
    }

    pub fn validate(&self) -> Result<()> {
        if self.positions_m.is_empty() {
            return Err(Error::InvalidParameter("at least one sensor is required".into()));
        }
        if !(self.altitude_m >= 0.0 && self.altitude_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sensor altitude must be finite and nonnegative, got {}",
                self.altitude_m
            )));
        }
        for (j, p) in self.positions_m.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidParameter(format!("sensor {j} has a non-finite position")));
            }
            for (k, q) in self.positions_m[..j].iter().enumerate() {
                if p.distance_to(q) < COINCIDENT_SENSOR_TOLERANCE_M {
                    return Err(Error::InvalidParameter(format!("sensors {k} and {j} are coincident")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions_m.is_empty()
    }

    /// The first `m` sensors as a new array.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.len() {
            return Err(Error::InvalidParameter(format!(
                "sensor prefix {m} out of range 1..={}",
                self.len()
            )));
        }
        Self::new(self.positions_m[..m].to_vec(), self.altitude_m)
    }

    /// Uniformly random positions in the open square `(0, extent)²`.
    pub fn random_layout(count: usize, extent_m: f64, altitude_m: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let positions = (0..count)
            .map(|_| Point::new(rng.random::<f64>() * extent_m, rng.random::<f64>() * extent_m))
            .collect();
        Self::new(positions, altitude_m)
    }

    /// Index of the sensor whose ground projection is closest to `location`.
    pub fn nearest(&self, location: &Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (j, p) in self.positions_m.iter().enumerate() {
            let d = p.distance_to(location);
            if d < best_d {
                best = j;
                best_d = d;
            }
        }
        best
    }
}

/// Three-dimensional range from a sensor at altitude `altitude_m` to a ground location.
pub fn distance(sensor: &Point, altitude_m: f64, location: &Point) -> f64 {
    let dx = sensor.x - location.x;
    let dy = sensor.y - location.y;
    (dx * dx + dy * dy + altitude_m * altitude_m).sqrt()
}

/// Rectangular grid of candidate emitter locations.
///
/// Point `(ix, iy)` (zero based) sits at `origin + ((ix + 0.5)·s, (iy + 0.5)·s)`
/// and has linear index `iy · nx + ix`, x varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateGrid {
    pub nx: usize,
    pub ny: usize,
    pub spacing_m: f64,
    #[serde(default = "origin")]
    pub origin_m: Point,
}

fn origin() -> Point {
    Point::new(0.0, 0.0)
}

impl CandidateGrid {
    pub fn new(nx: usize, ny: usize, spacing_m: f64, origin_m: Point) -> Result<Self> {
        let grid = Self {
            nx,
            ny,
            spacing_m,
            origin_m,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidParameter("grid must have at least one point".into()));
        }
        if !(self.spacing_m > 0.0 && self.spacing_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {}",
                self.spacing_m
            )));
        }
        if !self.origin_m.is_finite() {
            return Err(Error::InvalidParameter("grid origin must be finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    pub fn cell(&self, index: usize) -> (usize, usize) {
        (index % self.nx, index / self.nx)
    }

    pub fn point(&self, index: usize) -> Point {
        let (ix, iy) = self.cell(index);
        Point::new(
            self.origin_m.x + (ix as f64 + 0.5) * self.spacing_m,
            self.origin_m.y + (iy as f64 + 0.5) * self.spacing_m,
        )
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Index of the grid cell whose square contains `p`, if any.
    pub fn containing_cell(&self, p: &Point) -> Option<usize> {
        let fx = (p.x - self.origin_m.x) / self.spacing_m;
        let fy = (p.y - self.origin_m.y) / self.spacing_m;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
        (ix < self.nx && iy < self.ny).then(|| self.index(ix, iy))
    }

    /// Index of the grid point nearest to `p` (clamped to the grid).
    pub fn nearest(&self, p: &Point) -> usize {
        let clamp = |f: f64, n: usize| (f.round().max(0.0) as usize).min(n - 1);
        let ix = clamp((p.x - self.origin_m.x) / self.spacing_m - 0.5, self.nx);
        let iy = clamp((p.y - self.origin_m.y) / self.spacing_m - 0.5, self.ny);
        self.index(ix, iy)
    }
}

/// An emitter at an arbitrary (not necessarily on-grid) position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Emitter {
    pub position_m: Point,
    pub power: f64,
}

impl Emitter {
    pub const fn new(position_m: Point, power: f64) -> Self {
        Self { position_m, power }
    }
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub grid: CandidateGrid,
    pub sensors: SensorArray,
    pub model: PathlossModel,
    pub sigma_db: f64,
    #[serde(default)]
    pub emitters: Vec<Emitter>,
    /// Exponent assumed by the recovery when it differs from the true channel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assumed_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_m: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_m: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.sensors.validate()?;
        self.model.validate()?;
        if !(self.sigma_db >= 0.0 && self.sigma_db.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_db must be finite and nonnegative, got {}",
                self.sigma_db
            )));
        }
        for (i, e) in self.emitters.iter().enumerate() {
            if !(e.power >= 0.0 && e.power.is_finite()) || !e.position_m.is_finite() {
                return Err(Error::InvalidParameter(format!("emitter {i} is invalid")));
            }
        }
        if let Some(n) = self.assumed_exponent {
            self.model.with_exponent(n)?;
        }
        if let Some(cfg) = &self.solver {
            cfg.validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Model used for recovery: the true model, or the assumed exponent if set.
    pub fn recovery_model(&self) -> Result<PathlossModel> {
        match self.assumed_exponent {
            Some(n) => self.model.with_exponent(n),
            None => Ok(self.model),
        }
    }
}

/// `M × N` matrix of pathloss gains; rows are sensors, columns grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    entries: DMatrix<f64>,
}

impl MeasurementMatrix {
    pub fn from_entries(entries: DMatrix<f64>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Number of sensors.
    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of candidate locations.
    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn column(&self, i: usize) -> nalgebra::DVectorView<'_, f64> {
        self.entries.column(i)
    }

    pub fn column_norm(&self, i: usize) -> f64 {
        self.entries.column(i).norm()
    }

    /// Row-major CSV, one sensor per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for j in 0..self.nrows() {
            let row: Vec<String> = (0..self.ncols())
                .map(|i| format!("{:e}", self.entries[(j, i)]))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Builds `Φ` with entry `(j, i) = k_ref · (r0 / r_ij)^n`.
pub fn build_measurement_matrix(
    grid: &CandidateGrid,
    sensors: &SensorArray,
    model: &PathlossModel,
) -> Result<MeasurementMatrix> {
    let m = sensors.len();
    let columns: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| column_for(&grid.point(i), sensors, model))
        .collect::<Result<_>>()?;
    let entries = DMatrix::from_fn(m, grid.len(), |j, i| columns[i][j]);
    Ok(MeasurementMatrix { entries })
}

fn column_for(location: &Point, sensors: &SensorArray, model: &PathlossModel) -> Result<Vec<f64>> {
    sensors
        .positions_m
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let r = distance(s, sensors.altitude_m, location);
            if r == 0.0 {
                return Err(Error::ZeroDistance {
                    sensor: j,
                    x: location.x,
                    y: location.y,
                });
            }
            Ok(model.gain(r))
        })
        .collect()
}

/// Noiseless signature of a unit-power emitter at an arbitrary location.
pub fn signature(location: &Point, sensors: &SensorArray, model: &PathlossModel) -> Result<DVector<f64>> {
    Ok(DVector::from_vec(column_for(location, sensors, model)?))
}

/// `d0 = Φ p`.
pub fn forward(matrix: &MeasurementMatrix, powers: &DVector<f64>) -> Result<DVector<f64>> {
    if powers.len() != matrix.ncols() {
        return Err(Error::DimensionMismatch {
            expected: matrix.ncols(),
            actual: powers.len(),
        });
    }
    Ok(matrix.entries() * powers)
}

/// Noiseless data from emitters at their exact positions.
pub fn forward_offgrid(emitters: &[Emitter], sensors: &SensorArray, model: &PathlossModel) -> Result<DVector<f64>> {
    let mut d = DVector::zeros(sensors.len());
    for e in emitters {
        if e.power.is_nan() || e.power < 0.0 {
            return Err(Error::InvalidParameter(format!("negative emitter power {}", e.power)));
        }
        d.axpy(e.power, &signature(&e.position_m, sensors, model)?, 1.0);
    }
    Ok(d)
}
