use nalgebra::{DMatrix, DVector, Dim, Matrix, Storage, U1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scene::MeasurementMatrix;

/// `|x·y| / (‖x‖ ‖y‖)`, clamped to `[0, 1]` against rounding.
pub fn coherence<R1, S1, R2, S2>(x: &Matrix<f64, R1, U1, S1>, y: &Matrix<f64, R2, U1, S2>) -> Result<f64>
where
    R1: Dim,
    R2: Dim,
    S1: Storage<f64, R1, U1>,
    S2: Storage<f64, R2, U1>,
{
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let nx = x.norm();
    let ny = y.norm();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = x.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
    Ok((dot.abs() / (nx * ny)).min(1.0))
}

/// Columns scaled to unit Euclidean norm, with the original norms.
pub(crate) fn unit_columns(matrix: &MeasurementMatrix) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let mut unit = matrix.entries().clone();
    let mut norms = Vec::with_capacity(unit.ncols());
    for (i, mut col) in unit.column_iter_mut().enumerate() {
        let n = col.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroColumn(i));
        }
        col /= n;
        norms.push(n);
    }
    Ok((unit, norms))
}

/// Largest coherence between two distinct columns.
pub fn mutual_coherence(matrix: &MeasurementMatrix) -> Result<f64> {
    if matrix.ncols() < 2 {
        return Err(Error::InvalidParameter(
            "mutual coherence needs at least two columns".into(),
        ));
    }
    let (unit, _) = unit_columns(matrix)?;
    let n = unit.ncols();
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let ui = unit.column(i);
            ((i + 1)..n)
                .map(|k| ui.dot(&unit.column(k)).abs())
                .fold(0.0_f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best.min(1.0))
}

/// Coherence of every column with a fixed unit vector.
pub(crate) fn coherence_with(unit: &DMatrix<f64>, column: &DVector<f64>) -> DVector<f64> {
    (unit.transpose() * column).map(f64::abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn coherence_examples() {
        assert_relative_eq!(coherence(&v(&[1.0, 2.0, 3.0]), &v(&[1.0, 2.0, 3.0])).unwrap(), 1.0);
        assert_eq!(coherence(&v(&[1.0, 0.0]), &v(&[0.0, 2.0])).unwrap(), 0.0);
        assert_relative_eq!(
            coherence(&v(&[1.0, 0.0]), &v(&[1.0, 1.0])).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-15
        );
        assert_relative_eq!(coherence(&v(&[1.0, -2.0]), &v(&[-3.0, 6.0])).unwrap(), 1.0);
        assert!(matches!(
            coherence(&v(&[0.0, 0.0]), &v(&[1.0, 1.0])),
            Err(Error::ZeroVector)
        ));
        assert!(coherence(&v(&[1.0]), &v(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn mutual_coherence_examples() {
        let eye = MeasurementMatrix::from_entries(DMatrix::identity(4, 4));
        assert_eq!(mutual_coherence(&eye).unwrap(), 0.0);

        let dup = MeasurementMatrix::from_entries(DMatrix::from_row_slice(2, 3, &[1.0, 0.5, 1.0, 2.0, 0.1, 2.0]));
        assert_relative_eq!(mutual_coherence(&dup).unwrap(), 1.0, max_relative = 1e-15);

        let zero = MeasurementMatrix::from_entries(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]));
        assert!(matches!(mutual_coherence(&zero), Err(Error::ZeroColumn(1))));
    }
}
