//! Resolution between two candidate locations and detectability thresholds.

mod clearance;
mod lognormal;
mod quadrature;
mod resolution;

pub use clearance::{clearance_map, detectability_threshold, detectability_threshold_in, ClearanceReport, DataNorm};
pub use lognormal::{fit_lognormal_sum, FentonWilkinson, LognormalFit, LognormalSumFit};
pub use quadrature::{integrate, Quadrature};
pub use resolution::{
    difference_cdf, discriminant_weights, fit_groups, monte_carlo_q_positive, monte_carlo_resolution,
    normalized_signature, prob_correct_assignment, prob_correct_assignment_with, resolution_map, ResolutionField,
    ResolutionQuery, DEGENERATE_TOLERANCE, QUADRATURE_BUDGET, QUADRATURE_TOLERANCE,
};
