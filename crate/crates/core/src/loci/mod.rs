//! Degeneracy loci `V^k` of a state's pencil.
//!
//! `V^0` is linear in r and is computed exactly from a null space. Higher
//! loci are sampled numerically; an empty sample is not a proof of emptiness.

mod dimension;
mod linear;
mod pencil;
mod point;
mod search;

use thiserror::Error;

pub use dimension::local_dimension;
pub use linear::{locus_zero, LinearLocus};
pub use pencil::{
    hermitian_form, in_locus, pencil_from_ensemble, pencil_from_state, rank_at, residual_at, Pencil,
    PencilSource, Residual,
};
pub use point::{ProjectivePoint, POINT_TOL};
pub use search::{is_locus_empty, sample_locus, LocusPoint, LocusSample, LocusVerdict, SearchConfig, SearchStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LociError {
    #[error("projective point needs a nonzero finite coordinate vector")]
    ZeroPoint,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("pencil has no blocks or empty blocks")]
    EmptyPencil,
    #[error("rank bound k = {k} out of range (must be below {limit})")]
    InvalidK { k: usize, limit: usize },
    #[error("point is not on the locus")]
    NotOnLocus,
}

pub type Result<T> = std::result::Result<T, LociError>;
