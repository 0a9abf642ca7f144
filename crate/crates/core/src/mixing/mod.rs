//! Necessary conditions for mixing: spectral majorization, locus-containment
//! certificates, Schmidt-rank caps and genericity of empty loci.
//!
//! Every check here is one-sided. A failed condition rules a mixture out; a
//! passed condition proves nothing about existence.

mod certificate;
mod genericity;
mod majorization;
mod schmidt;

use thiserror::Error;

use crate::loci::LociError;
use crate::states::StateError;

pub use certificate::{
    check_component_all, check_component_necessary, LevelStats, MixCertificate, MixVerdict, NoObstructionStats,
};
pub use genericity::{
    codimension, generic_empty_predicate, monte_carlo_genericity, GenericityQuery, GenericityReport, ResidualSummary,
    TrialOutcome, TrialVerdict,
};
pub use majorization::{check_mixed_mix_eigen, check_pure_mix_eigen, check_reduced_constraints, majorizes};
pub use schmidt::{
    check_ensemble_schmidt, excludes_max_schmidt_rank, forces_separable, schmidt_bounds, schmidt_rank_cap,
    SchmidtBounds,
};

/// Slack for weight sums and majorization partial sums.
pub const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MixError {
    #[error("weights sum to {0}, expected 1")]
    WeightSumInvalid(f64),
    #[error("weights must be positive and finite (got {0})")]
    NonPositiveWeight(f64),
    #[error("no components given")]
    NoComponents,
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(String, String),
    #[error("rank bound k = {k} out of range (must be below {limit})")]
    InvalidK { k: usize, limit: usize },
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Loci(#[from] LociError),
}

pub type Result<T> = std::result::Result<T, MixError>;

fn check_weights(weights: &[f64]) -> Result<()> {
    for &w in weights {
        if !(w.is_finite() && w > 0.0) {
            return Err(MixError::NonPositiveWeight(w));
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(MixError::WeightSumInvalid(total));
    }
    Ok(())
}
