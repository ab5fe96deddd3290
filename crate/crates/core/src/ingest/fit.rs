use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Log-distance pathloss regression result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathlossFit {
    pub n_hat: f64,
    pub sigma_db_hat: f64,
    /// Power at the reference distance implied by the intercept.
    pub k_hat: f64,
    pub count: usize,
}

/// Divides every RSS value by the one measured at the nearest sensor.
pub fn normalize_rss(rss: &[f64], distances_m: &[f64]) -> Result<Vec<f64>> {
    if rss.len() != distances_m.len() {
        return Err(Error::DimensionMismatch {
            expected: rss.len(),
            actual: distances_m.len(),
        });
    }
    if rss.is_empty() {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }
    if let Some((index, &value)) = rss.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::NonpositiveRss { index, value });
    }
    let nearest = distances_m
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty");
    let reference = rss[nearest];
    Ok(rss.iter().map(|v| v / reference).collect())
}

/// Ordinary least squares of `10·log10(rss)` on `−10·log10(d / r0)`; the slope
/// is the exponent and the residual spread (divisor `count − 2`) is the
/// shadowing deviation in dB.
pub fn fit_pathloss(points: &[(f64, f64)], reference_distance_m: f64) -> Result<PathlossFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: points.len(),
        });
    }
    if !(reference_distance_m.is_finite() && reference_distance_m > 0.0) {
        return Err(Error::InvalidParameter("reference distance must be positive".into()));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for (index, &(d, p)) in points.iter().enumerate() {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "distance {d} at position {index} must be positive"
            )));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::NonpositiveRss { index, value: p });
        }
        xs.push(-10.0 * (d / reference_distance_m).log10());
        ys.push(10.0 * p.log10());
    }
    if points.iter().all(|&(d, _)| d == points[0].0) {
        return Err(Error::CollinearDegenerate);
    }
    let count = points.len();
    let mean_x = xs.iter().sum::<f64>() / count as f64;
    let mean_y = ys.iter().sum::<f64>() / count as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let n_hat = sxy / sxx;
    let intercept = mean_y - n_hat * mean_x;
    let sigma_db_hat = if count > 2 {
        let ssr: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - n_hat * x).powi(2))
            .sum();
        (ssr / (count - 2) as f64).sqrt()
    } else {
        0.0
    };
    Ok(PathlossFit {
        n_hat,
        sigma_db_hat,
        k_hat: 10f64.powf(intercept / 10.0),
        count,
    })
}
