//! Probability of assigning an emitter to the correct one of two candidate
//! locations from noisy data.
//!
//! With data `d` from an emitter at `q1`, the emitter is assigned to `q1` when
//! `μ(d, b1) > μ(d, b2)`, i.e. when `c·d > 0` with `c = b1 − b2`. That is
//! `Q = Σ w_j exp(η R_j) > 0` for `w_j = c_j · g(r_1j)`. `Q` is split by sign
//! into `Q⁺ − Q⁻`, each side is replaced by a fitted lognormal and
//! `P(Q > 0) = 1 − H(0)` where `H` is the CDF of the difference.

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::lognormal::{FentonWilkinson, LognormalFit, LognormalSumFit};
use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::noise::{shadowing_factor, Seed};
use crate::scene::{signature, CandidateGrid, PathlossModel, Point, SensorArray};

/// Below this `‖b1 − b2‖` the two hypotheses are indistinguishable.
pub const DEGENERATE_TOLERANCE: f64 = 1e-12;
/// Absolute tolerance of the CDF quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
/// Integrand evaluation budget per CDF value.
pub const QUADRATURE_BUDGET: usize = 100_000;
/// Half-width, in standard deviations, of the integration window in log space.
const LOG_WINDOW: f64 = 12.0;

#[derive(Debug, Clone, Copy)]
pub struct ResolutionQuery<'a> {
    pub q1: Point,
    pub q2: Point,
    pub sensors: &'a SensorArray,
    pub model: &'a PathlossModel,
    pub sigma_db: f64,
}

/// Noiseless data from a location, scaled to unit Euclidean norm.
pub fn normalized_signature(location: &Point, sensors: &SensorArray, model: &PathlossModel) -> Result<DVector<f64>> {
    let d = signature(location, sensors, model)?;
    let n = d.norm();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::ZeroSignature {
            x: location.x,
            y: location.y,
        });
    }
    Ok(d / n)
}

/// `w_j = (b1_j − b2_j) · g(r_1j)`; mixed signs in general.
pub fn discriminant_weights(query: &ResolutionQuery<'_>) -> Result<DVector<f64>> {
    let b1 = normalized_signature(&query.q1, query.sensors, query.model)?;
    let b2 = normalized_signature(&query.q2, query.sensors, query.model)?;
    let c = b1 - b2;
    if c.norm() < DEGENERATE_TOLERANCE {
        return Err(Error::Degenerate);
    }
    let g1 = signature(&query.q1, query.sensors, query.model)?;
    Ok(c.component_mul(&g1))
}

/// Splits weights into the magnitudes of the nonnegative and negative groups.
/// Zero weights contribute nothing and are dropped.
fn split_weights(w: &DVector<f64>) -> (Vec<f64>, Vec<f64>) {
    let plus = w.iter().copied().filter(|&v| v > 0.0).collect();
    let minus = w.iter().copied().filter(|&v| v < 0.0).map(|v| -v).collect();
    (plus, minus)
}

fn std_normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn std_normal_cdf(u: f64) -> f64 {
    0.5 * erfc(-u / std::f64::consts::SQRT_2)
}

/// CDF `H(x) = P(X − Y ≤ x)` of the difference of independent lognormals `X ~ plus`, `Y ~ minus`.
///
/// Evaluates `∫_{max(0,−x)}^∞ F₊(x + y) g₋(y) dy` after substituting
/// `y = exp(μ₋ + σ₋ u)`, which turns the lognormal density into a standard
/// normal one and removes the singular behaviour at `y = 0`.
pub fn difference_cdf(plus: &LognormalFit, minus: &LognormalFit, x: f64) -> Result<f64> {
    match (plus.empty, minus.empty) {
        (true, true) => return Ok(if x >= 0.0 { 1.0 } else { 0.0 }),
        (false, true) => return Ok(plus.cdf(x)),
        (true, false) => return Ok(if x >= 0.0 { 1.0 } else { 1.0 - minus.cdf(-x) }),
        (false, false) => {}
    }
    if minus.sigma == 0.0 {
        return Ok(plus.cdf(x + minus.mu.exp()));
    }
    let lower = if x < 0.0 {
        ((-x).ln() - minus.mu) / minus.sigma
    } else {
        f64::NEG_INFINITY
    };
    let lo = lower.max(-LOG_WINDOW);
    if lo >= LOG_WINDOW {
        return Ok(0.0);
    }
    let tail_below = if lower > -LOG_WINDOW {
        0.0
    } else {
        std_normal_cdf(-LOG_WINDOW)
    };
    let integrand = |u: f64| plus.cdf(x + (minus.mu + minus.sigma * u).exp()) * std_normal_pdf(u);
    let q = integrate(integrand, lo, LOG_WINDOW, QUADRATURE_TOLERANCE, QUADRATURE_BUDGET)?;
    // mass below the window sees F₊ at x + ~0, which is F₊(x)
    let below = tail_below * plus.cdf(x.max(0.0));
    Ok((q.value + below).clamp(0.0, 1.0))
}

/// Fitted lognormals for `Q⁺` and `Q⁻`.
pub fn fit_groups(
    weights: &DVector<f64>,
    sigma_db: f64,
    fitter: &impl LognormalSumFit,
) -> (LognormalFit, LognormalFit) {
    let (plus, minus) = split_weights(weights);
    (fitter.fit(&plus, sigma_db), fitter.fit(&minus, sigma_db))
}

/// Analytic approximation of `P(Q > 0)`; 0.5 for indistinguishable locations.
pub fn prob_correct_assignment(query: &ResolutionQuery<'_>) -> Result<f64> {
    prob_correct_assignment_with(query, &FentonWilkinson)
}

pub fn prob_correct_assignment_with(query: &ResolutionQuery<'_>, fitter: &impl LognormalSumFit) -> Result<f64> {
    let w = match discriminant_weights(query) {
        Ok(w) => w,
        Err(Error::Degenerate) => return Ok(0.5),
        Err(e) => return Err(e),
    };
    if query.sigma_db == 0.0 {
        let total = w.sum();
        return Ok(if total > 0.0 {
            1.0
        } else if total < 0.0 {
            0.0
        } else {
            0.5
        });
    }
    let (plus, minus) = fit_groups(&w, query.sigma_db, fitter);
    if minus.empty {
        return Ok(1.0);
    }
    if plus.empty {
        return Ok(0.0);
    }
    Ok((1.0 - difference_cdf(&plus, &minus, 0.0)?).clamp(0.0, 1.0))
}

/// Fraction of simulated trials (data from `q1`) with `μ(d, b1) > μ(d, b2)`.
/// Degenerate queries report 0.5.
pub fn monte_carlo_resolution(query: &ResolutionQuery<'_>, trials: u64, seed: Seed) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let b1 = normalized_signature(&query.q1, query.sensors, query.model)?;
    let b2 = normalized_signature(&query.q2, query.sensors, query.model)?;
    if (&b1 - &b2).norm() < DEGENERATE_TOLERANCE {
        return Ok(0.5);
    }
    let d1 = signature(&query.q1, query.sensors, query.model)?;
    let sigma_db = query.sigma_db;
    let wins = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = seed.trial_rng(t);
            let d = d1.map(|g| g * shadowing_factor(&mut rng, sigma_db));
            // ‖b‖ = 1 and d > 0, so comparing coherences is comparing dot products
            b1.dot(&d) > b2.dot(&d)
        })
        .count();
    Ok(wins as f64 / trials as f64)
}

/// `P(Q > 0)` for one anchor against every grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionField {
    pub anchor_m: Point,
    pub grid: CandidateGrid,
    pub sigma_db: f64,
    /// One entry per grid point; `None` where the quadrature failed.
    pub values: Vec<Option<f64>>,
}

impl ResolutionField {
    pub fn value_at(&self, p: &Point) -> Option<f64> {
        self.values[self.grid.nearest(p)]
    }

    pub fn failures(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i].is_none()).collect()
    }

    /// Cells where the approximation fell below the coin-toss level.
    pub fn below_half(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| matches!(self.values[i], Some(v) if v < 0.5))
            .collect()
    }
}

/// Evaluates the resolution probability for `q2` at every grid point. The cell
/// containing the anchor is assigned the degenerate value 0.5.
pub fn resolution_map(
    anchor: Point,
    grid: &CandidateGrid,
    sensors: &SensorArray,
    model: &PathlossModel,
    sigma_db: f64,
) -> ResolutionField {
    let anchor_cell = grid.containing_cell(&anchor);
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            if Some(i) == anchor_cell {
                return Some(0.5);
            }
            let query = ResolutionQuery {
                q1: anchor,
                q2: grid.point(i),
                sensors,
                model,
                sigma_db,
            };
            prob_correct_assignment(&query).ok()
        })
        .collect();
    ResolutionField {
        anchor_m: anchor,
        grid: *grid,
        sigma_db,
        values,
    }
}

/// Monte Carlo probability that a random draw of `Q` is positive, for checking
/// the analytic route directly from weights.
pub fn monte_carlo_q_positive<R: Rng>(weights: &DVector<f64>, sigma_db: f64, trials: usize, rng: &mut R) -> f64 {
    let mut wins = 0usize;
    for _ in 0..trials {
        let q: f64 = weights.iter().map(|&w| w * shadowing_factor(rng, sigma_db)).sum();
        if q > 0.0 {
            wins += 1;
        }
    }
    wins as f64 / trials as f64
}
