//! Detectability: the weakest additional emitter that would make the
//! reconstructed data inconsistent with the measurements at tolerance ε.
//!
//! If the recovered powers fit the data to within ε, an extra emitter of power
//! `P` at grid point `i` changes the synthesized data by `P Φ_i`, and the
//! reverse triangle inequality guarantees a misfit above ε once
//! `P > 2ε / ‖Φ_i‖`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::MeasurementMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataNorm {
    #[default]
    Euclidean,
    Supremum,
}

impl DataNorm {
    fn column_norm(self, matrix: &MeasurementMatrix, i: usize) -> f64 {
        let col = matrix.column(i);
        match self {
            DataNorm::Euclidean => col.norm(),
            DataNorm::Supremum => col.amax(),
        }
    }
}

/// `2ε / ‖Φ_i‖₂`.
pub fn detectability_threshold(matrix: &MeasurementMatrix, index: usize, epsilon: f64) -> Result<f64> {
    detectability_threshold_in(matrix, index, epsilon, DataNorm::Euclidean)
}

pub fn detectability_threshold_in(
    matrix: &MeasurementMatrix,
    index: usize,
    epsilon: f64,
    norm: DataNorm,
) -> Result<f64> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    if index >= matrix.ncols() {
        return Err(Error::DimensionMismatch {
            expected: matrix.ncols(),
            actual: index,
        });
    }
    let n = norm.column_norm(matrix, index);
    if n == 0.0 {
        return Err(Error::ZeroColumn(index));
    }
    Ok(2.0 * epsilon / n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClearanceReport {
    pub epsilon: f64,
    pub norm: DataNorm,
    pub region: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub maximum: f64,
    /// Grid index attaining the maximum (first in region order on ties).
    pub argmax: usize,
}

/// Per-index thresholds over a region and the largest of them: every emitter
/// in the region above `maximum` is detectable.
pub fn clearance_map(
    matrix: &MeasurementMatrix,
    region: &[usize],
    epsilon: f64,
    norm: DataNorm,
) -> Result<ClearanceReport> {
    if region.is_empty() {
        return Err(Error::InvalidParameter("clearance region is empty".into()));
    }
    let thresholds = region
        .iter()
        .map(|&i| detectability_threshold_in(matrix, i, epsilon, norm))
        .collect::<Result<Vec<_>>>()?;
    let mut k_max = 0;
    for (k, &t) in thresholds.iter().enumerate() {
        if t > thresholds[k_max] {
            k_max = k;
        }
    }
    Ok(ClearanceReport {
        epsilon,
        norm,
        region: region.to_vec(),
        maximum: thresholds[k_max],
        argmax: region[k_max],
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{build_measurement_matrix, distance, CandidateGrid, PathlossModel, Point, SensorArray};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn setup() -> (CandidateGrid, SensorArray, PathlossModel, MeasurementMatrix) {
        let grid = CandidateGrid::new(20, 20, 2.5, Point::new(0.0, 0.0)).unwrap();
        let sensors = SensorArray::random_layout(12, 50.0, 10.0, 8).unwrap();
        let model = PathlossModel::new(3.5, 1.0).unwrap();
        let phi = build_measurement_matrix(&grid, &sensors, &model).unwrap();
        (grid, sensors, model, phi)
    }

    #[test]
    fn threshold_scaling() {
        let (_, _, _, phi) = setup();
        assert_eq!(detectability_threshold(&phi, 7, 0.0).unwrap(), 0.0);
        let t1 = detectability_threshold(&phi, 7, 2e-4).unwrap();
        let t2 = detectability_threshold(&phi, 7, 4e-4).unwrap();
        assert_relative_eq!(t2, 2.0 * t1, max_relative = 1e-15);
        assert_relative_eq!(t1, 4e-4 / phi.column_norm(7), max_relative = 1e-15);
        let sup = detectability_threshold_in(&phi, 7, 2e-4, DataNorm::Supremum).unwrap();
        assert!(sup >= t1);
    }

    #[test]
    fn zero_column_is_an_error() {
        let phi = MeasurementMatrix::from_entries(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]));
        assert!(matches!(
            detectability_threshold(&phi, 1, 1.0),
            Err(Error::ZeroColumn(1))
        ));
    }

    #[test]
    fn single_index_region() {
        let (_, _, _, phi) = setup();
        let report = clearance_map(&phi, &[42], 1e-4, DataNorm::Euclidean).unwrap();
        assert_eq!(report.maximum, detectability_threshold(&phi, 42, 1e-4).unwrap());
        assert_eq!(report.argmax, 42);
    }

    #[test]
    fn zero_epsilon_region() {
        let (grid, _, _, phi) = setup();
        let region: Vec<usize> = (0..grid.len()).collect();
        let report = clearance_map(&phi, &region, 0.0, DataNorm::Euclidean).unwrap();
        assert!(report.thresholds.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn full_grid_maximum_at_weakest_column() {
        let (grid, sensors, model, phi) = setup();
        let region: Vec<usize> = (0..grid.len()).collect();
        let report = clearance_map(&phi, &region, 2e-4, DataNorm::Euclidean).unwrap();
        // independent scan: smallest Σ_j r_ij^(-2n) from raw distances
        let weakest = (0..grid.len())
            .min_by(|&a, &b| {
                let energy = |i: usize| -> f64 {
                    sensors
                        .positions_m
                        .iter()
                        .map(|s| distance(s, sensors.altitude_m, &grid.point(i)).powf(-2.0 * model.exponent))
                        .sum()
                };
                energy(a).total_cmp(&energy(b))
            })
            .unwrap();
        assert_eq!(report.argmax, weakest);
        assert!(report.thresholds.iter().all(|&t| t <= report.maximum));
    }
}
