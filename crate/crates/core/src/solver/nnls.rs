//! Lawson–Hanson active-set nonnegative least squares on a handful of columns.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scene::MeasurementMatrix;

/// Columns whose Gram–Schmidt remainder (relative to unit norm) falls below
/// this are treated as linearly dependent on earlier support columns.
const RANK_TOLERANCE: f64 = 1e-8;

/// Nonnegative powers on `support` minimizing `‖Φ_S p − d‖₂`.
///
/// `support` is taken in insertion order; if the restricted columns are rank
/// deficient the error names the first column (in that order) that depends on
/// the ones before it. `tolerance` is the dual-feasibility threshold, relative
/// to `‖d‖`, applied with unit-normalized columns.
pub fn nnls_on_support(
    matrix: &MeasurementMatrix,
    d: &DVector<f64>,
    support: &[usize],
    tolerance: f64,
) -> Result<Vec<f64>> {
    if d.len() != matrix.nrows() {
        return Err(Error::DimensionMismatch {
            expected: matrix.nrows(),
            actual: d.len(),
        });
    }
    if support.is_empty() {
        return Err(Error::InvalidParameter("support must be nonempty".into()));
    }
    let m = matrix.nrows();
    let mut a = DMatrix::zeros(m, support.len());
    let mut norms = Vec::with_capacity(support.len());
    for (k, &i) in support.iter().enumerate() {
        if i >= matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.ncols(),
                actual: i,
            });
        }
        let col = matrix.column(i);
        let n = col.norm();
        if n == 0.0 {
            return Err(Error::ZeroColumn(i));
        }
        a.set_column(k, &(col / n));
        norms.push(n);
    }
    if let Some(k) = first_dependent_column(&a) {
        return Err(Error::DegenerateSupport { newest: support[k] });
    }
    let x = lawson_hanson(&a, d, tolerance * d.norm());
    Ok(x.iter().zip(&norms).map(|(xi, n)| xi / n).collect())
}

fn first_dependent_column(a: &DMatrix<f64>) -> Option<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(a.ncols());
    for k in 0..a.ncols() {
        let mut v = a.column(k).into_owned();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&v);
                v.axpy(-proj, q, 1.0);
            }
        }
        let n = v.norm();
        if n < RANK_TOLERANCE {
            return Some(k);
        }
        basis.push(v / n);
    }
    None
}

/// Unconstrained least squares on the passive columns via thin QR.
fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[usize]) -> DVector<f64> {
    let sub = a.select_columns(passive);
    let qr = sub.qr();
    let rhs = qr.q().transpose() * b;
    qr.r()
        .solve_upper_triangular(&rhs)
        .expect("passive columns are independent")
}

fn lawson_hanson(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let mut entering = None;
        let mut best = tol;
        for j in 0..n {
            if !passive[j] && w[j] > best {
                best = w[j];
                entering = Some(j);
            }
        }
        let Some(j) = entering else { break };
        passive[j] = true;

        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let z_p = least_squares(a, b, &idx);
            if z_p.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = z_p[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if z_p[k] <= 0.0 {
                    alpha = alpha.min(x[i] / (x[i] - z_p[k]));
                }
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (z_p[k] - x[i]);
                if x[i] <= f64::EPSILON * x.amax().max(1.0) {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}
