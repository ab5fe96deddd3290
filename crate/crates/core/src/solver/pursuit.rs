//! Greedy pursuit with nonnegative power estimates.
//!
//! Each iteration adds the admissible column best correlated with the current
//! residual, refits all powers by NNLS on the support, and (for the
//! band-excluded variant) sweeps the support once in insertion order, moving
//! each index to the best column of its own coherence band when that strictly
//! lowers the residual.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::coherence::{coherence_with, unit_columns};
use super::nnls::nnls_on_support;
use super::{SolverConfig, SparseSolution, Termination};
use crate::error::{Error, Result};
use crate::noise::termination_epsilon;
use crate::scene::MeasurementMatrix;

// Powers at or below this fraction of the largest are treated as zero.
const NEGLIGIBLE_POWER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Orthogonal matching pursuit with nonnegative refits.
    Omp,
    /// Band-excluded, locally optimized OMP.
    Bloomp,
}

/// Reusable solver for one measurement matrix. Thread-safe; bands are cached lazily.
pub struct PursuitSolver {
    matrix: MeasurementMatrix,
    unit: DMatrix<f64>,
    bands: Vec<OnceLock<Vec<usize>>>,
    config: SolverConfig,
    strategy: Strategy,
}

#[derive(Debug, Clone)]
struct Fit {
    support: Vec<usize>,
    powers: Vec<f64>,
    residual: f64,
}

impl Fit {
    fn empty(d: &DVector<f64>) -> Self {
        Self {
            support: Vec::new(),
            powers: Vec::new(),
            residual: d.norm(),
        }
    }
}

impl PursuitSolver {
    pub fn new(matrix: &MeasurementMatrix, config: SolverConfig, strategy: Strategy) -> Result<Self> {
        config.validate()?;
        let (unit, _) = unit_columns(matrix)?;
        Ok(Self {
            matrix: matrix.clone(),
            bands: (0..unit.ncols()).map(|_| OnceLock::new()).collect(),
            unit,
            config,
            strategy,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn matrix(&self) -> &MeasurementMatrix {
        &self.matrix
    }

    /// Columns whose coherence with column `i` exceeds β (always includes `i`).
    pub fn band(&self, i: usize) -> &[usize] {
        self.bands[i].get_or_init(|| {
            let u = self.unit.column(i).into_owned();
            let coh = coherence_with(&self.unit, &u);
            (0..coh.len())
                .filter(|&k| k == i || coh[k] > self.config.band_threshold)
                .collect()
        })
    }

    fn column_coherence(&self, a: usize, b: usize) -> f64 {
        self.unit.column(a).dot(&self.unit.column(b)).abs().min(1.0)
    }

    fn refit(&self, d: &DVector<f64>, support: Vec<usize>) -> Result<Fit> {
        let powers = nnls_on_support(&self.matrix, d, &support, self.config.nnls_tolerance)?;
        let floor = NEGLIGIBLE_POWER * powers.iter().copied().fold(0.0, f64::max);
        let kept: Vec<usize> = (0..support.len()).filter(|&j| powers[j] > floor).collect();
        let (support, powers) = if kept.len() == support.len() {
            (support, powers)
        } else {
            let support: Vec<usize> = kept.iter().map(|&j| support[j]).collect();
            let powers = nnls_on_support(&self.matrix, d, &support, self.config.nnls_tolerance)?;
            (support, powers)
        };
        let residual = self.residual_vector(d, &support, &powers).norm();
        Ok(Fit {
            support,
            powers,
            residual,
        })
    }

    fn residual_vector(&self, d: &DVector<f64>, support: &[usize], powers: &[f64]) -> DVector<f64> {
        let mut r = d.clone();
        for (&i, &p) in support.iter().zip(powers) {
            r.axpy(-p, &self.matrix.column(i), 1.0);
        }
        r
    }

    /// The admissible column with the largest |correlation| with the residual,
    /// followed by the one with the largest positive correlation if different.
    fn select(&self, d: &DVector<f64>, fit: &Fit, excluded: &[bool]) -> Vec<usize> {
        let r = self.residual_vector(d, &fit.support, &fit.powers);
        let corr = self.unit.transpose() * r;
        let mut admissible: Vec<bool> = excluded.iter().map(|&e| !e).collect();
        for &s in &fit.support {
            admissible[s] = false;
        }
        if self.strategy == Strategy::Bloomp {
            for &s in &fit.support {
                let coh = coherence_with(&self.unit, &self.unit.column(s).into_owned());
                for (k, ok) in admissible.iter_mut().enumerate() {
                    if coh[k] > self.config.band_threshold {
                        *ok = false;
                    }
                }
            }
        }
        let (mut by_abs, mut by_pos) = (None, None);
        let (mut abs_best, mut pos_best) = (0.0, 0.0);
        for (k, &c) in corr.iter().enumerate() {
            if !admissible[k] {
                continue;
            }
            if c.abs() > abs_best {
                abs_best = c.abs();
                by_abs = Some(k);
            }
            if c > pos_best {
                pos_best = c;
                by_pos = Some(k);
            }
        }
        let mut picks: Vec<usize> = by_abs.into_iter().collect();
        picks.extend(by_pos.filter(|&p| Some(p) != by_abs));
        picks
    }

    /// One sweep over the support in insertion order.
    fn local_optimize(&self, d: &DVector<f64>, mut fit: Fit, excluded: &[bool]) -> Fit {
        let mut pos = 0;
        while pos < fit.support.len() {
            let current = fit.support[pos];
            let mut best: Option<Fit> = None;
            let mut best_residual = fit.residual;
            for &k in self.band(current) {
                if k == current || excluded[k] || fit.support.contains(&k) {
                    continue;
                }
                let compatible = fit
                    .support
                    .iter()
                    .enumerate()
                    .all(|(q, &s)| q == pos || self.column_coherence(k, s) <= self.config.band_threshold);
                if !compatible {
                    continue;
                }
                let mut trial = fit.support.clone();
                trial[pos] = k;
                if let Ok(candidate) = self.refit(d, trial) {
                    if candidate.residual < best_residual {
                        best_residual = candidate.residual;
                        best = Some(candidate);
                    }
                }
            }
            if let Some(better) = best {
                // pruning can shorten the support; keep the sweep position valid
                fit = better;
            }
            pos += 1;
        }
        fit
    }

    pub fn solve(&self, d: &DVector<f64>) -> Result<SparseSolution> {
        self.solve_traced(d).map(|(solution, _)| solution)
    }

    /// Solves and also returns the residual norm after each accepted iteration
    /// (the first entry is `‖d‖`).
    pub fn solve_traced(&self, d: &DVector<f64>) -> Result<(SparseSolution, Vec<f64>)> {
        if d.len() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                actual: d.len(),
            });
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("data vector is not finite".into()));
        }
        let cfg = &self.config;
        let epsilon = termination_epsilon(d, cfg.sigma_db, cfg.termination_c).max(cfg.residual_floor * d.norm());

        let mut fit = Fit::empty(d);
        let mut history = vec![fit.residual];
        let mut excluded = vec![false; self.matrix.ncols()];
        let mut iterations = 0;

        let terminated_by = loop {
            if fit.residual <= epsilon {
                break Termination::NoiseFloor;
            }
            if fit.support.len() >= cfg.max_sparsity {
                break Termination::MaxSparsity;
            }
            let candidates = self.select(d, &fit, &excluded);
            let mut candidate = None;
            let mut degenerate = None;
            for next in candidates {
                if candidate.is_some() || degenerate.is_some() {
                    break;
                }
                let mut support = fit.support.clone();
                support.push(next);
                match self.refit(d, support) {
                    Ok(c) if c.residual <= fit.residual * (1.0 - cfg.stall_tolerance) => candidate = Some(c),
                    Ok(_) => {}
                    Err(Error::DegenerateSupport { newest }) => degenerate = Some(newest),
                    Err(e) => return Err(e),
                }
            }
            if let Some(newest) = degenerate {
                excluded[newest] = true;
                continue;
            }
            let Some(candidate) = candidate else {
                break Termination::Stall;
            };
            iterations += 1;
            let candidate = if self.strategy == Strategy::Bloomp && cfg.local_optimization {
                self.local_optimize(d, candidate, &excluded)
            } else {
                candidate
            };
            fit = candidate;
            history.push(fit.residual);
        };

        Ok((
            SparseSolution {
                support: fit.support,
                powers: fit.powers,
                residual_norm: fit.residual,
                iterations,
                terminated_by,
            },
            history,
        ))
    }
}

pub fn omp_solve(matrix: &MeasurementMatrix, d: &DVector<f64>, config: &SolverConfig) -> Result<SparseSolution> {
    PursuitSolver::new(matrix, config.clone(), Strategy::Omp)?.solve(d)
}

pub fn bloomp_solve(matrix: &MeasurementMatrix, d: &DVector<f64>, config: &SolverConfig) -> Result<SparseSolution> {
    PursuitSolver::new(matrix, config.clone(), Strategy::Bloomp)?.solve(d)
}
