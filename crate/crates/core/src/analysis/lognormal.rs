//! Single-lognormal approximation of a positively weighted sum of independent
//! lognormal shadowing factors.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::noise::ETA;

/// `exp(N(mu, sigma²))`; `empty` marks a vacuous sum (identically zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalFit {
    pub mu: f64,
    pub sigma: f64,
    pub empty: bool,
}

impl LognormalFit {
    pub const EMPTY: LognormalFit = LognormalFit {
        mu: f64::NEG_INFINITY,
        sigma: 0.0,
        empty: true,
    };

    pub fn mean(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            (self.mu + 0.5 * self.sigma * self.sigma).exp()
        }
    }

    pub fn variance(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            let s2 = self.sigma * self.sigma;
            s2.exp_m1() * (2.0 * self.mu + s2).exp()
        }
    }

    /// `P(X ≤ x)`. With `sigma == 0` the distribution is a point mass at `exp(mu)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.empty {
            return if x >= 0.0 { 1.0 } else { 0.0 };
        }
        if x <= 0.0 {
            return 0.0;
        }
        let z = x.ln() - self.mu;
        if self.sigma == 0.0 {
            return if z >= 0.0 { 1.0 } else { 0.0 };
        }
        0.5 * erfc(-z / (self.sigma * std::f64::consts::SQRT_2))
    }
}

/// Strategy for fitting a lognormal to `Σ w_j exp(η R_j)`, `R_j ~ N(0, σ_dB²)` i.i.d.
pub trait LognormalSumFit {
    fn fit(&self, weights: &[f64], sigma_db: f64) -> LognormalFit;
}

/// Two-moment matching (Fenton–Wilkinson): the fit has exactly the sum's mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct FentonWilkinson;

impl LognormalSumFit for FentonWilkinson {
    fn fit(&self, weights: &[f64], sigma_db: f64) -> LognormalFit {
        if weights.is_empty() {
            return LognormalFit::EMPTY;
        }
        debug_assert!(weights.iter().all(|&w| w > 0.0));
        let s2 = (ETA * sigma_db).powi(2);
        let sum_w: f64 = weights.iter().sum();
        let sum_w2: f64 = weights.iter().map(|w| w * w).sum();
        let mean = sum_w * (0.5 * s2).exp();
        let variance = sum_w2 * s2.exp() * s2.exp_m1();
        let sigma_sq = (variance / (mean * mean)).ln_1p();
        LognormalFit {
            mu: mean.ln() - 0.5 * sigma_sq,
            sigma: sigma_sq.sqrt(),
            empty: false,
        }
    }
}

/// Fenton–Wilkinson fit of `Σ w_j exp(η R_j)` for positive weights.
pub fn fit_lognormal_sum(weights: &[f64], sigma_db: f64) -> LognormalFit {
    FentonWilkinson.fit(weights, sigma_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{Seed, ETA};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn single_term_is_exact() {
        let f = fit_lognormal_sum(&[1.0], 3.0);
        assert_relative_eq!(f.mu, 0.0, epsilon = 1e-15);
        assert_relative_eq!(f.sigma, ETA * 3.0, max_relative = 1e-12);
        let g = fit_lognormal_sum(&[3.0], 3.0);
        assert_relative_eq!(g.mu, 3f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(g.sigma, ETA * 3.0, max_relative = 1e-12);
    }

    #[test]
    fn empty_sum_is_flagged() {
        let f = fit_lognormal_sum(&[], 3.0);
        assert!(f.empty);
        assert_eq!(f.mean(), 0.0);
        assert_eq!(f.cdf(0.0), 1.0);
    }

    #[test]
    fn two_equal_weights_against_monte_carlo() {
        let fit = fit_lognormal_sum(&[1.0, 1.0], 3.0);
        assert_relative_eq!(fit.mean(), 2.0 * 1.269_452_131_623_435_7, max_relative = 1e-12);
        assert_relative_eq!(fit.variance(), 2.0 * 0.985_451_622_372_284_1, max_relative = 1e-12);

        let mut rng = Seed(2024).trial_rng(0);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let s = (ETA * 3.0 * a).exp() + (ETA * 3.0 * b).exp();
            sum += s;
            sum_sq += s * s;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert_relative_eq!(mean, fit.mean(), max_relative = 0.01);
        assert_relative_eq!(var, fit.variance(), max_relative = 0.01);
    }

    proptest! {
        #[test]
        fn moments_are_matched(
            weights in proptest::collection::vec(1e-6f64..1e3, 1..20),
            sigma_db in 0.1f64..8.0,
        ) {
            let fit = fit_lognormal_sum(&weights, sigma_db);
            let s2 = (ETA * sigma_db).powi(2);
            let mean: f64 = weights.iter().sum::<f64>() * (0.5 * s2).exp();
            let var: f64 = weights.iter().map(|w| w * w).sum::<f64>() * s2.exp() * s2.exp_m1();
            prop_assert!(fit.sigma > 0.0);
            prop_assert!((fit.mean() - mean).abs() <= 1e-12 * mean);
            prop_assert!((fit.variance() - var).abs() <= 1e-12 * var);
        }
    }
}
