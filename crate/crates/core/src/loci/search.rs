//! Multistart search for points of `V^k` with k ≥ 1.
//!
//! Each start draws a spherical Gaussian point and runs a damped
//! Gauss–Newton iteration on the trailing singular block of `M(r) = Σ r_i A_i`:
//! with `U_t`, `V_t` the left and right singular vectors past index k, the
//! block `U_t† M(r + δ) V_t` is linear in δ, and its least-squares zero in the
//! tangent space `r^⊥` is the step. Steps are accepted only if the tail norm
//! `(Σ_{j>k} σ_j²)^{1/2}` decreases (halving up to 40 times); a steepest-descent
//! step is the fallback. Membership is judged on σ_{k+1} alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{in_locus, locus_zero, Pencil, ProjectivePoint};
use crate::numeric::{complete_orthonormal, svd, vec_norm, Complex64, ComplexMatrix, SvdResult, ToleranceConfig};
use crate::seeds;

const STEP_TOL: f64 = 1e-12;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// A locus whose converged points collapse to at most this many distinct
    /// points is reported as apparently isolated.
    pub max_clusters: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            max_iter: 500,
            max_clusters: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocusPoint {
    pub point: ProjectivePoint,
    /// σ_{k+1} at the point.
    pub residual: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchStats {
    pub starts: usize,
    pub converged: usize,
    /// Smallest σ_{k+1} reached by any start, with its threshold.
    pub best_residual: f64,
    pub best_threshold: f64,
    pub best_point: Option<ProjectivePoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocusSample {
    pub k: usize,
    /// `k ≥ max_rank` or the pencil is zero: every point lies in the locus.
    pub trivial: bool,
    pub points: Vec<LocusPoint>,
    pub stats: SearchStats,
    pub appears_isolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LocusVerdict {
    EmptyExact,
    NonemptyWitness(ProjectivePoint),
    /// No point found; carries the smallest σ_{k+1} seen and its threshold.
    EmptyHeuristic { min_residual: f64, threshold: f64 },
}

impl LocusVerdict {
    pub fn is_nonempty(&self) -> bool {
        matches!(self, LocusVerdict::NonemptyWitness(_))
    }
}

struct Evaluation {
    svd: SvdResult,
    sigma: f64,
    threshold: f64,
    tail: f64,
}

fn evaluate(p: &Pencil, k: usize, r: &[Complex64], tol: &ToleranceConfig) -> Evaluation {
    let m = p.evaluate(r);
    let s = svd(&m);
    let sigma = s.singular_values.get(k).copied().unwrap_or(0.0);
    let threshold = tol.threshold_for(&m, &s.singular_values);
    let tail = s.singular_values[k.min(s.singular_values.len())..]
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    Evaluation {
        svd: s,
        sigma,
        threshold,
        tail,
    }
}

/// Local result of one start.
#[derive(Debug, Clone)]
pub(crate) struct LocalResult {
    pub point: Vec<Complex64>,
    pub sigma: f64,
    pub threshold: f64,
}

fn normalized(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

fn pinv_solve(a: &ComplexMatrix, b: &[Complex64]) -> Vec<Complex64> {
    let s = svd(a);
    let smax = s.sigma_max();
    let mut x = vec![Complex64::new(0.0, 0.0); a.cols()];
    if smax == 0.0 {
        return x;
    }
    for (j, &sj) in s.singular_values.iter().enumerate() {
        if sj <= smax * 1e-13 {
            break;
        }
        let uj = s.left_vectors.column(j);
        let coef: Complex64 = uj.iter().zip(b).map(|(u, bb)| u.conj() * bb).sum::<Complex64>() / sj;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += s.right_vectors[(i, j)] * coef;
        }
    }
    x
}

pub(crate) fn minimize(
    p: &Pencil,
    k: usize,
    start: Vec<Complex64>,
    max_iter: usize,
    tol: &ToleranceConfig,
) -> LocalResult {
    let dim = p.ambient_dim();
    let mut r = normalized(start);
    let mut ev = evaluate(p, k, &r, tol);
    if dim == 1 {
        return LocalResult {
            point: r,
            sigma: ev.sigma,
            threshold: ev.threshold,
        };
    }
    let (rows, cols) = (p.rows(), p.cols());

    for _ in 0..max_iter {
        if ev.tail == 0.0 || ev.sigma < tol.abs_floor * 1e-3 {
            break;
        }
        let u = &ev.svd.left_vectors;
        let v = &ev.svd.right_vectors;
        let tr = rows - k;
        let tc = cols - k;
        // tail block S = U_t† M V_t and its derivative blocks U_t† A_i V_t
        let ut = u.block(0, k, rows, tr).adjoint();
        let vt = v.block(0, k, cols, tc);
        let m = p.evaluate(&r);
        let s_block = ut.matmul(&m).matmul(&vt);
        let tangent: Vec<Vec<Complex64>> = complete_orthonormal(vec![r.clone()], dim, dim)
            .into_iter()
            .skip(1)
            .collect();
        let derivs: Vec<ComplexMatrix> = p.blocks().iter().map(|a| ut.matmul(a).matmul(&vt)).collect();
        let mut jt = ComplexMatrix::zeros(tr * tc, tangent.len());
        for (c, tvec) in tangent.iter().enumerate() {
            for (i, d) in derivs.iter().enumerate() {
                let w = tvec[i];
                if w.re == 0.0 && w.im == 0.0 {
                    continue;
                }
                for (e, &z) in d.as_slice().iter().enumerate() {
                    jt[(e, c)] += w * z;
                }
            }
        }
        let rhs: Vec<Complex64> = s_block.as_slice().iter().map(|z| -z).collect();

        let gn = pinv_solve(&jt, &rhs);
        let lift = |coef: &[Complex64]| -> Vec<Complex64> {
            let mut d = vec![Complex64::new(0.0, 0.0); dim];
            for (cf, tvec) in coef.iter().zip(&tangent) {
                d.iter_mut().zip(tvec).for_each(|(x, &t)| *x += cf * t);
            }
            d
        };
        let mut accepted = try_direction(p, k, &r, &lift(&gn), ev.tail, tol);
        if accepted.is_none() {
            // steepest descent on ‖S + J c‖²: direction −J†S, Cauchy step length
            let grad = jt.adjoint().matvec(&s_block.as_slice().to_vec());
            let jg = jt.matvec(&grad);
            let gg: f64 = vec_norm(&grad).powi(2);
            let jgn: f64 = vec_norm(&jg).powi(2);
            if gg > 0.0 && jgn > 0.0 {
                let alpha = gg / jgn;
                let dir: Vec<Complex64> = grad.iter().map(|g| -g * alpha).collect();
                accepted = try_direction(p, k, &r, &lift(&dir), ev.tail, tol);
            }
        }
        match accepted {
            Some((r_new, ev_new, step)) => {
                r = r_new;
                ev = ev_new;
                if step < STEP_TOL {
                    break;
                }
            }
            None => break,
        }
    }
    LocalResult {
        point: r,
        sigma: ev.sigma,
        threshold: ev.threshold,
    }
}

fn try_direction(
    p: &Pencil,
    k: usize,
    r: &[Complex64],
    delta: &[Complex64],
    tail: f64,
    tol: &ToleranceConfig,
) -> Option<(Vec<Complex64>, Evaluation, f64)> {
    let dn = vec_norm(delta);
    if dn == 0.0 || !dn.is_finite() {
        return None;
    }
    // cap very long steps; the model is only local
    let mut alpha = if dn > 1.0 { 1.0 / dn } else { 1.0 };
    for _ in 0..MAX_HALVINGS {
        let cand = normalized(r.iter().zip(delta).map(|(a, d)| a + d * alpha).collect());
        let ev = evaluate(p, k, &cand, tol);
        if ev.tail < tail {
            return Some((cand, ev, alpha * dn));
        }
        alpha *= 0.5;
    }
    None
}

fn random_start(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if vec_norm(&v) > 0.0 {
            return v;
        }
    }
}

/// Samples `V^k` by multistart minimization of σ_{k+1} over the unit sphere.
///
/// An empty point list means nothing was found, not that the locus is empty.
pub fn sample_locus(p: &Pencil, k: usize, config: &SearchConfig, tol: &ToleranceConfig) -> LocusSample {
    let dim = p.ambient_dim();
    if k >= p.max_rank() || p.is_zero() {
        return LocusSample {
            k,
            trivial: true,
            points: Vec::new(),
            stats: SearchStats {
                starts: 0,
                converged: 0,
                best_residual: 0.0,
                best_threshold: tol.abs_floor,
                best_point: Some(ProjectivePoint::basis(dim, 0)),
            },
            appears_isolated: false,
        };
    }

    let runs: Vec<LocalResult> = (0..config.starts)
        .into_par_iter()
        .map(|s| {
            let start = random_start(dim, seeds::derive(config.seed, s as u64));
            minimize(p, k, start, config.max_iter, tol)
        })
        .collect();

    let best = runs
        .iter()
        .min_by(|a, b| (a.sigma / a.threshold).total_cmp(&(b.sigma / b.threshold)));
    let stats = SearchStats {
        starts: config.starts,
        converged: runs.iter().filter(|r| r.sigma <= r.threshold).count(),
        best_residual: best.map_or(f64::INFINITY, |b| b.sigma),
        best_threshold: best.map_or(tol.abs_floor, |b| b.threshold),
        best_point: best.and_then(|b| ProjectivePoint::new(&b.point).ok()),
    };

    let mut points: Vec<LocusPoint> = Vec::new();
    for run in runs.iter().filter(|r| r.sigma <= r.threshold) {
        let Ok(pt) = ProjectivePoint::new(&run.point) else { continue };
        if points.iter().any(|q| q.point.same_as(&pt)) {
            continue;
        }
        if !in_locus(p, k, &pt, tol).unwrap_or(false) {
            continue;
        }
        points.push(LocusPoint {
            point: pt,
            residual: run.sigma,
            threshold: run.threshold,
        });
    }
    points.sort_by(|a, b| a.point.canonical_cmp(&b.point));
    let appears_isolated = !points.is_empty() && points.len() <= config.max_clusters;
    LocusSample {
        k,
        trivial: false,
        points,
        stats,
        appears_isolated,
    }
}

/// Emptiness of `V^k`: exact for k = 0, witness-or-heuristic otherwise.
pub fn is_locus_empty(p: &Pencil, k: usize, config: &SearchConfig, tol: &ToleranceConfig) -> LocusVerdict {
    if k == 0 && !p.is_zero() {
        let lin = locus_zero(p, tol);
        return match lin.points().into_iter().next() {
            Some(pt) => LocusVerdict::NonemptyWitness(pt),
            None => LocusVerdict::EmptyExact,
        };
    }
    let sample = sample_locus(p, k, config, tol);
    if sample.trivial {
        return LocusVerdict::NonemptyWitness(ProjectivePoint::basis(p.ambient_dim(), 0));
    }
    match sample.points.into_iter().next() {
        Some(lp) => LocusVerdict::NonemptyWitness(lp.point),
        None => LocusVerdict::EmptyHeuristic {
            min_residual: sample.stats.best_residual,
            threshold: sample.stats.best_threshold,
        },
    }
}
