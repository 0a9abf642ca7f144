use serde::{Deserialize, Serialize};

use crate::loci::{locus_zero, pencil_from_state};
use crate::numeric::ToleranceConfig;
use crate::states::{schmidt_rank, DensityMatrix, Ensemble, Side};

/// Exact `V^0` dimensions on both sides and the caps they imply for the
/// Schmidt rank of any pure state in any ensemble of ρ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchmidtBounds {
    pub dim_a: isize,
    pub dim_b: isize,
    /// `m − 1 − dim V_A^0`
    pub cap_a: usize,
    /// `n − 1 − dim V_B^0`
    pub cap_b: usize,
    pub cap: usize,
    pub forces_separable: bool,
    pub excludes_max_schmidt_rank: bool,
}

pub fn schmidt_bounds(rho: &DensityMatrix, tol: &ToleranceConfig) -> SchmidtBounds {
    let shape = rho.shape();
    let dim = |side: Side| locus_zero(&pencil_from_state(rho, side, tol), tol).projective_dimension;
    let (dim_a, dim_b) = (dim(Side::A), dim(Side::B));
    let cap_a = (shape.m as isize - 1 - dim_a) as usize;
    let cap_b = (shape.n as isize - 1 - dim_b) as usize;
    let cap = cap_a.min(cap_b);
    SchmidtBounds {
        dim_a,
        dim_b,
        cap_a,
        cap_b,
        cap,
        forces_separable: dim_a == shape.m as isize - 2 || dim_b == shape.n as isize - 2,
        // a nonempty V^0 on the larger side only caps the rank below that
        // side's dimension, which need not be below min(m, n)
        excludes_max_schmidt_rank: cap < shape.m.min(shape.n),
    }
}

pub fn schmidt_rank_cap(rho: &DensityMatrix, tol: &ToleranceConfig) -> usize {
    schmidt_bounds(rho, tol).cap
}

pub fn forces_separable(rho: &DensityMatrix, tol: &ToleranceConfig) -> bool {
    schmidt_bounds(rho, tol).forces_separable
}

pub fn excludes_max_schmidt_rank(rho: &DensityMatrix, tol: &ToleranceConfig) -> bool {
    schmidt_bounds(rho, tol).excludes_max_schmidt_rank
}

/// A state of Schmidt number `bound` needs a member of Schmidt rank at least
/// `bound` in every ensemble; false means the ensemble cannot be one of its
/// decompositions.
pub fn check_ensemble_schmidt(bound: usize, e: &Ensemble, tol: &ToleranceConfig) -> bool {
    e.members().iter().map(|(_, s)| schmidt_rank(s, tol)).max().unwrap_or(0) >= bound
}
