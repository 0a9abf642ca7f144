use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{MixError, Result};
use crate::loci::{
    locus_zero, pencil_from_ensemble, rank_at, residual_at, sample_locus, Pencil, ProjectivePoint, Residual,
    SearchConfig,
};
use crate::numeric::{svd, Complex64, ComplexMatrix, ToleranceConfig};
use crate::seeds;
use crate::states::{eigen_ensemble, DensityMatrix, Side};

/// Required margin between a residual and the rank threshold, both ways.
const GUARD: f64 = 10.0;

/// A point of `V^k(target)` at which the component's pencil has rank > k.
/// Since loci of a mixture sit inside the loci of each component, such a
/// point rules the component out of every decomposition of the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixCertificate {
    pub witness: ProjectivePoint,
    pub side: Side,
    pub k: usize,
    pub rank_in_target: usize,
    pub rank_in_component: usize,
    pub target_residual: Residual,
    pub component_residual: Residual,
}

fn passes_guard(target: &Residual, component: &Residual) -> bool {
    target.sigma <= target.threshold / GUARD && component.sigma >= GUARD * component.threshold
}

impl MixCertificate {
    /// Rebuilds both pencils from fresh spectral decompositions and checks
    /// the witness against the guard bands again.
    pub fn verify(&self, target: &DensityMatrix, component: &DensityMatrix, tol: &ToleranceConfig) -> bool {
        let tp = pencil_from_ensemble(&eigen_ensemble(target, tol), self.side);
        let cp = pencil_from_ensemble(&eigen_ensemble(component, tol), self.side);
        let (Ok(tr), Ok(cr)) = (
            residual_at(&tp, self.k, &self.witness, tol),
            residual_at(&cp, self.k, &self.witness, tol),
        ) else {
            return false;
        };
        let ranks_ok = rank_at(&tp, &self.witness, tol).is_ok_and(|r| r <= self.k)
            && rank_at(&cp, &self.witness, tol).is_ok_and(|r| r > self.k);
        ranks_ok && passes_guard(&tr, &cr)
    }
}

/// What one rank bound contributed to a negative verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub k: usize,
    /// `V^0` was computed exactly rather than sampled.
    pub exact: bool,
    /// `V^k(target)` is the whole space.
    pub target_trivial: bool,
    /// Candidate points of `V^k(target)` that were tested.
    pub target_points: usize,
    /// Largest `σ_{k+1} / threshold` of the component over those points.
    pub best_component_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoObstructionStats {
    pub levels: Vec<LevelStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MixVerdict {
    Infeasible(MixCertificate),
    /// Nothing ruled the component out; this is not a proof that it fits.
    NoObstructionFound(NoObstructionStats),
}

impl MixVerdict {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, MixVerdict::Infeasible(_))
    }
}

fn pencils(target: &DensityMatrix, component: &DensityMatrix, side: Side, tol: &ToleranceConfig) -> Result<(Pencil, Pencil)> {
    if target.shape() != component.shape() {
        return Err(MixError::ShapeMismatch(
            target.shape().to_string(),
            component.shape().to_string(),
        ));
    }
    Ok((
        pencil_from_ensemble(&eigen_ensemble(target, tol), side),
        pencil_from_ensemble(&eigen_ensemble(component, tol), side),
    ))
}

/// Points of exact `V^0(target)`, best candidate first: the direction inside
/// the locus where the component's entries are largest.
fn zero_locus_candidates(tp: &Pencil, cp: &Pencil, tol: &ToleranceConfig) -> Vec<ProjectivePoint> {
    let lin = locus_zero(tp, tol);
    if lin.is_empty() {
        return Vec::new();
    }
    let basis = ComplexMatrix::from_columns(&lin.basis);
    let s = svd(&cp.stacked().matmul(&basis));
    let mut out = Vec::new();
    if let Ok(p) = ProjectivePoint::new(&basis.matvec(&s.right_vectors.column(0))) {
        out.push(p);
    }
    out.extend(lin.points());
    out
}

fn random_points(dim: usize, count: usize, seed: u64) -> Vec<ProjectivePoint> {
    let mut out: Vec<ProjectivePoint> = (0..dim).map(|i| ProjectivePoint::basis(dim, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < dim + count {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(p) = ProjectivePoint::new(&v) {
            out.push(p);
        }
    }
    out
}

fn level(
    tp: &Pencil,
    cp: &Pencil,
    k: usize,
    config: &SearchConfig,
    tol: &ToleranceConfig,
) -> Result<(Option<MixCertificate>, LevelStats)> {
    let target_trivial = k >= tp.max_rank() || tp.is_zero();
    let exact = k == 0 && !target_trivial;
    let candidates = if target_trivial {
        random_points(tp.ambient_dim(), config.starts, seeds::derive(config.seed, k as u64))
    } else if exact {
        zero_locus_candidates(tp, cp, tol)
    } else {
        sample_locus(tp, k, config, tol).points.into_iter().map(|lp| lp.point).collect()
    };

    let mut stats = LevelStats {
        k,
        exact,
        target_trivial,
        target_points: candidates.len(),
        best_component_ratio: None,
    };
    for point in candidates {
        let tr = residual_at(tp, k, &point, tol)?;
        let cr = residual_at(cp, k, &point, tol)?;
        let ratio = cr.sigma / cr.threshold;
        stats.best_component_ratio = Some(stats.best_component_ratio.map_or(ratio, |b: f64| b.max(ratio)));
        if passes_guard(&tr, &cr) {
            let cert = MixCertificate {
                rank_in_target: rank_at(tp, &point, tol)?,
                rank_in_component: rank_at(cp, &point, tol)?,
                witness: point,
                side: tp.side(),
                k,
                target_residual: tr,
                component_residual: cr,
            };
            return Ok((Some(cert), stats));
        }
    }
    Ok((None, stats))
}

/// Tests whether `V^k(target)` fits inside `V^k(component)` at the points it
/// can find. `V^0` is exact; higher loci are sampled.
pub fn check_component_necessary(
    target: &DensityMatrix,
    component: &DensityMatrix,
    side: Side,
    k: usize,
    config: &SearchConfig,
    tol: &ToleranceConfig,
) -> Result<MixVerdict> {
    let (tp, cp) = pencils(target, component, side, tol)?;
    if k >= tp.rows() {
        return Err(MixError::InvalidK { k, limit: tp.rows() });
    }
    let (cert, stats) = level(&tp, &cp, k, config, tol)?;
    Ok(match cert {
        Some(c) => MixVerdict::Infeasible(c),
        None => MixVerdict::NoObstructionFound(NoObstructionStats { levels: vec![stats] }),
    })
}

/// Scans k = 0, 1, … below `min(side dimension, rank target)` and stops at
/// the first certificate.
pub fn check_component_all(
    target: &DensityMatrix,
    component: &DensityMatrix,
    side: Side,
    config: &SearchConfig,
    tol: &ToleranceConfig,
) -> Result<MixVerdict> {
    let (tp, cp) = pencils(target, component, side, tol)?;
    let mut levels = Vec::new();
    for k in 0..tp.max_rank() {
        let (cert, stats) = level(&tp, &cp, k, config, tol)?;
        if let Some(c) = cert {
            return Ok(MixVerdict::Infeasible(c));
        }
        levels.push(stats);
    }
    Ok(MixVerdict::NoObstructionFound(NoObstructionStats { levels }))
}
