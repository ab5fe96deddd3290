//! Sparse recovery of emitter powers: coherence measures, nonnegative least
//! squares on a support, and greedy pursuit (plain OMP and the band-excluded,
//! locally optimized variant).

mod coherence;
mod nnls;
mod pursuit;

pub use coherence::{coherence, mutual_coherence};
pub use nnls::nnls_on_support;
pub use pursuit::{bloomp_solve, omp_solve, PursuitSolver, Strategy};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::DEFAULT_TERMINATION_C;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Upper bound on the number of recovered emitters.
    pub max_sparsity: usize,
    /// Band-exclusion coherence threshold β in `[0, 1)`.
    pub band_threshold: f64,
    pub termination_c: f64,
    /// Noise level (dB) the stopping rule assumes.
    pub sigma_db: f64,
    pub local_optimization: bool,
    pub nnls_tolerance: f64,
    /// Absolute stopping floor, relative to `‖d‖`; lets noiseless data terminate.
    pub residual_floor: f64,
    /// An iteration that shrinks the residual by less than this fraction stalls.
    pub stall_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_sparsity: 12,
            band_threshold: 0.98,
            termination_c: DEFAULT_TERMINATION_C,
            sigma_db: 0.0,
            local_optimization: true,
            nnls_tolerance: 1e-10,
            residual_floor: 1e-9,
            stall_tolerance: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn with_sigma_db(mut self, sigma_db: f64) -> Self {
        self.sigma_db = sigma_db;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_sparsity == 0 {
            return Err(Error::InvalidParameter("max_sparsity must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.band_threshold) {
            return Err(Error::InvalidParameter(format!(
                "band threshold must lie in [0, 1), got {}",
                self.band_threshold
            )));
        }
        if !(self.termination_c > 0.0 && self.termination_c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "termination constant must be positive, got {}",
                self.termination_c
            )));
        }
        if !(self.sigma_db >= 0.0 && self.sigma_db.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_db must be nonnegative, got {}",
                self.sigma_db
            )));
        }
        for (name, v) in [
            ("nnls_tolerance", self.nnls_tolerance),
            ("residual_floor", self.residual_floor),
            ("stall_tolerance", self.stall_tolerance),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be nonnegative")));
            }
        }
        Ok(())
    }
}

/// Why the greedy iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    NoiseFloor,
    MaxSparsity,
    Stall,
}

/// Recovered emitters: grid indices in insertion order and their powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSolution {
    pub support: Vec<usize>,
    pub powers: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub terminated_by: Termination,
}

impl SparseSolution {
    /// Full-length power vector over all `n` grid points.
    pub fn dense(&self, n: usize) -> DVector<f64> {
        let mut p = DVector::zeros(n);
        for (&i, &v) in self.support.iter().zip(&self.powers) {
            p[i] = v;
        }
        p
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }
}
