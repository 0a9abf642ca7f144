use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MixError, Result};
use crate::loci::{in_locus, is_locus_empty, pencil_from_state, residual_at, LocusVerdict, ProjectivePoint, SearchConfig};
use crate::numeric::{singular_values, ToleranceConfig};
use crate::seeds;
use crate::states::{random_density, BipartiteShape, Side};

/// Random rank-r states on `m ⊗ n`, side-A locus at rank bound t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericityQuery {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
}

fn validate(q: &GenericityQuery) -> Result<()> {
    if q.m == 0 || q.n == 0 {
        return Err(MixError::ParameterOutOfRange(format!("shape {}x{}", q.m, q.n)));
    }
    if q.r == 0 || q.r > q.m * q.n {
        return Err(MixError::ParameterOutOfRange(format!(
            "rank r = {} must lie in 1..={}",
            q.r,
            q.m * q.n
        )));
    }
    if q.t >= q.n.min(q.r) {
        return Err(MixError::ParameterOutOfRange(format!(
            "t = {} must be below min(n, r) = {}; otherwise the locus is the whole space",
            q.t,
            q.n.min(q.r)
        )));
    }
    Ok(())
}

/// Codimension `(n − t)(r − t)` of the rank ≤ t matrices among n×r matrices,
/// the space the side-A pencil maps into.
pub fn codimension(q: &GenericityQuery) -> Result<usize> {
    validate(q)?;
    Ok((q.n - q.t) * (q.r - q.t))
}

/// True when a generic rank-r state has empty `V_A^t`: the pencil's image is
/// an m-dimensional linear space, which misses a variety of codimension ≥ m.
pub fn generic_empty_predicate(q: &GenericityQuery) -> Result<bool> {
    Ok(codimension(q)? >= q.m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrialVerdict {
    EmptyExact,
    Nonempty,
    EmptyHeuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub verdict: TrialVerdict,
    pub witness: Option<ProjectivePoint>,
    pub witness_verified: bool,
    /// σ_{t+1} at the witness, or the smallest value the search reached.
    /// For t = 0 with an empty locus it is the smallest singular value of
    /// the stacked pencil, a lower bound for ‖Σ r_i A_i‖_F on the sphere.
    pub min_residual: f64,
    pub threshold: f64,
}

/// Statistics of `min_residual / threshold` over the trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub min_ratio: f64,
    pub median_ratio: f64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub query: GenericityQuery,
    pub predicate_holds: bool,
    pub codimension: usize,
    pub trials: usize,
    pub nonempty_count: usize,
    /// `None` when no trials ran.
    pub nonempty_fraction: Option<f64>,
    pub witnesses_verified: usize,
    pub residuals: Option<ResidualSummary>,
    pub outcomes: Vec<TrialOutcome>,
}

fn run_trial(q: &GenericityQuery, index: usize, config: &SearchConfig, tol: &ToleranceConfig) -> Result<TrialOutcome> {
    let shape = BipartiteShape::new(q.m, q.n);
    let rho = random_density(shape, q.r, seeds::derive(q.seed, 2 * index as u64))?;
    let p = pencil_from_state(&rho, Side::A, tol);
    let search = SearchConfig {
        seed: seeds::derive(q.seed, 2 * index as u64 + 1),
        ..*config
    };
    let outcome = match is_locus_empty(&p, q.t, &search, tol) {
        LocusVerdict::NonemptyWitness(w) => {
            let res = residual_at(&p, q.t, &w, tol)?;
            TrialOutcome {
                index,
                verdict: TrialVerdict::Nonempty,
                witness_verified: in_locus(&p, q.t, &w, tol)?,
                witness: Some(w),
                min_residual: res.sigma,
                threshold: res.threshold,
            }
        }
        LocusVerdict::EmptyHeuristic { min_residual, threshold } => TrialOutcome {
            index,
            verdict: TrialVerdict::EmptyHeuristic,
            witness: None,
            witness_verified: false,
            min_residual,
            threshold,
        },
        LocusVerdict::EmptyExact => {
            let stacked = p.stacked();
            let sv = singular_values(&stacked);
            TrialOutcome {
                index,
                verdict: TrialVerdict::EmptyExact,
                witness: None,
                witness_verified: false,
                min_residual: sv.last().copied().unwrap_or(0.0),
                threshold: tol.threshold_for(&stacked, &sv),
            }
        }
    };
    Ok(outcome)
}

/// Draws `trials` random rank-r states and decides `V_A^t` for each. Trial i
/// uses seeds derived from `(seed, i)`, so the report does not depend on
/// scheduling.
pub fn monte_carlo_genericity(
    q: &GenericityQuery,
    config: &SearchConfig,
    tol: &ToleranceConfig,
) -> Result<GenericityReport> {
    let predicate_holds = generic_empty_predicate(q)?;
    let outcomes = (0..q.trials)
        .into_par_iter()
        .map(|i| run_trial(q, i, config, tol))
        .collect::<Result<Vec<_>>>()?;

    let nonempty_count = outcomes.iter().filter(|o| o.verdict == TrialVerdict::Nonempty).count();
    let mut ratios: Vec<f64> = outcomes.iter().map(|o| o.min_residual / o.threshold).collect();
    ratios.sort_by(f64::total_cmp);
    let residuals = (!ratios.is_empty()).then(|| ResidualSummary {
        min_ratio: ratios[0],
        median_ratio: ratios[ratios.len() / 2],
        max_ratio: ratios[ratios.len() - 1],
    });
    Ok(GenericityReport {
        query: *q,
        predicate_holds,
        codimension: codimension(q)?,
        trials: q.trials,
        nonempty_count,
        nonempty_fraction: (q.trials > 0).then(|| nonempty_count as f64 / q.trials as f64),
        witnesses_verified: outcomes.iter().filter(|o| o.witness_verified).count(),
        residuals,
        outcomes,
    })
}
