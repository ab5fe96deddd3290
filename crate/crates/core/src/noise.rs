//! Lognormal shadowing: simulation, closed-form moments and the expected residual
//! used to stop the greedy solvers.
//!
//! Each emitter/sensor pair gets an independent factor `exp(η R)` with
//! `R ~ N(0, σ_dB²)` and `η = ln(10)/10`, so `exp(η R) = 10^(R/10)`.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{signature, Emitter, PathlossModel, SensorArray};

/// Converts decibels of shadowing into natural-log units.
pub const ETA: f64 = std::f64::consts::LN_10 / 10.0;

/// Default termination constant for the noise-floor stopping rule.
pub const DEFAULT_TERMINATION_C: f64 = 0.25;

/// Identity of the random stream, recorded in run manifests.
pub const RNG_IDENTITY: &str = "rand_chacha 0.9 ChaCha20Rng::seed_from_u64(seed), set_stream(trial); \
normals from rand_distr 0.5 StandardNormal (ziggurat); one draw per (emitter, sensor), emitter-major";

/// 64-bit experiment seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent substream for one Monte Carlo trial.
    pub fn trial_rng(self, trial: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.0);
        rng.set_stream(trial);
        rng
    }
}

impl Default for Seed {
    fn default() -> Self {
        Seed(42)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub sigma_db: f64,
}

impl NoiseParams {
    pub fn new(sigma_db: f64) -> Result<Self> {
        if !(sigma_db >= 0.0 && sigma_db.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_db must be finite and nonnegative, got {sigma_db}"
            )));
        }
        Ok(Self { sigma_db })
    }

    /// Standard deviation of `η R` (natural-log units).
    pub fn log_sigma(&self) -> f64 {
        ETA * self.sigma_db
    }

    pub fn moments(&self) -> NoiseMoments {
        noise_moments(self.sigma_db)
    }
}

/// Mean and variance of `exp(η R) − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseMoments {
    pub mu0: f64,
    pub sigma0_sq: f64,
}

impl NoiseMoments {
    /// `E[(exp(η R) − 1)²] = μ0² + σ0²`.
    pub fn second_moment(&self) -> f64 {
        self.mu0 * self.mu0 + self.sigma0_sq
    }
}

pub fn noise_moments(sigma_db: f64) -> NoiseMoments {
    let v = (ETA * sigma_db).powi(2);
    NoiseMoments {
        mu0: (v / 2.0).exp_m1(),
        sigma0_sq: v.exp() * v.exp_m1(),
    }
}

/// One shadowing factor `exp(η R)`.
pub fn shadowing_factor<R: Rng + ?Sized>(rng: &mut R, sigma_db: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    (ETA * sigma_db * z).exp()
}

/// Noisy aggregate RSS, drawing from the caller's stream.
pub fn simulate_noisy_data_with<R: Rng + ?Sized>(
    emitters: &[Emitter],
    sensors: &SensorArray,
    model: &PathlossModel,
    sigma_db: f64,
    rng: &mut R,
) -> Result<DVector<f64>> {
    NoiseParams::new(sigma_db)?;
    let mut d = DVector::zeros(sensors.len());
    for e in emitters {
        if e.power.is_nan() || e.power < 0.0 {
            return Err(Error::InvalidParameter(format!("negative emitter power {}", e.power)));
        }
        let g = signature(&e.position_m, sensors, model)?;
        for j in 0..sensors.len() {
            d[j] += e.power * g[j] * shadowing_factor(rng, sigma_db);
        }
    }
    Ok(d)
}

/// Noisy aggregate RSS for a single realization (trial 0 of `seed`).
pub fn simulate_noisy_data(
    emitters: &[Emitter],
    sensors: &SensorArray,
    model: &PathlossModel,
    sigma_db: f64,
    seed: Seed,
) -> Result<DVector<f64>> {
    simulate_noisy_data_with(emitters, sensors, model, sigma_db, &mut seed.trial_rng(0))
}

/// `(μ0² + σ0²) ‖d_ref‖²`, an upper bound on `E‖d − d0‖²` when `d_ref = d0`.
pub fn expected_residual_sq_bound(d_ref: &DVector<f64>, sigma_db: f64) -> f64 {
    noise_moments(sigma_db).second_moment() * d_ref.norm_squared()
}

/// Residual level `C · sqrt(μ0² + σ0²) · ‖d‖` below which the fit is noise-limited.
pub fn termination_epsilon(d: &DVector<f64>, sigma_db: f64, c: f64) -> f64 {
    c * noise_moments(sigma_db).second_moment().sqrt() * d.norm()
}
