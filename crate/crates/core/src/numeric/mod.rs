//! Dense complex linear algebra shared by every other module.
//!
//! Everything rank-related goes through [`ToleranceConfig::threshold`] so
//! that "rank ≤ k" means the same thing in the state model, the locus
//! searches and the mixing checks.

mod eig;
mod matrix;
mod svd;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eig::{hermitian_eig, EigResult};
pub(crate) use matrix::complete_orthonormal;
pub use matrix::{determinant, inner, vec_norm, ComplexMatrix};
pub use num_complex::Complex64;
pub use svd::{singular_values, svd, SvdResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, NumericError>;

/// Rank-decision policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub rank_rel_tol: f64,
    pub abs_floor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rel_tol: 1e-8,
            abs_floor: 1e-12,
        }
    }
}

impl ToleranceConfig {
    /// `max(rank_rel_tol · σ_max · max(rows, cols), abs_floor)`
    pub fn threshold(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        (self.rank_rel_tol * sigma_max * rows.max(cols) as f64).max(self.abs_floor)
    }

    pub fn threshold_for(&self, m: &ComplexMatrix, sv: &[f64]) -> f64 {
        self.threshold(sv.first().copied().unwrap_or(0.0), m.rows(), m.cols())
    }
}

/// Number of singular values strictly above the tolerance threshold.
pub fn numerical_rank(m: &ComplexMatrix, tol: &ToleranceConfig) -> usize {
    let sv = singular_values(m);
    let thr = tol.threshold_for(m, &sv);
    sv.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis of the right null space, one vector per entry.
pub fn null_space(m: &ComplexMatrix, tol: &ToleranceConfig) -> Vec<Vec<Complex64>> {
    let s = svd(m);
    let thr = tol.threshold_for(m, &s.singular_values);
    let rank = s.singular_values.iter().filter(|&&x| x > thr).count();
    (rank..m.cols()).map(|j| s.right_vectors.column(j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use matrix::c;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        let tol = ToleranceConfig::default();
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(3, 3), &tol), 0);
        assert_eq!(numerical_rank(&ComplexMatrix::identity(3), &tol), 3);
        // circulant pencil at r = (1, 1, 1) is the all-ones matrix
        let ones = ComplexMatrix::from_real_rows(&[&[1.0; 3], &[1.0; 3], &[1.0; 3]]);
        assert_eq!(numerical_rank(&ones, &tol), 1);
    }

    #[test]
    fn null_space_examples() {
        let tol = ToleranceConfig::default();
        assert!(null_space(&ComplexMatrix::identity(2), &tol).is_empty());
        assert_eq!(null_space(&ComplexMatrix::zeros(2, 2), &tol).len(), 2);
        let row = ComplexMatrix::from_real_rows(&[&[1.0, 1.0]]);
        let ns = null_space(&row, &tol);
        assert_eq!(ns.len(), 1);
        // spans (1, -1)/√2 up to phase
        let target = [c(1.0 / 2f64.sqrt(), 0.0), c(-1.0 / 2f64.sqrt(), 0.0)];
        assert!((inner(&ns[0], &target).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn psd_eigenvalues_match_singular_values() {
        let g = ComplexMatrix::from_row_major(
            3,
            2,
            vec![c(1.0, 0.5), c(0.0, -1.0), c(2.0, 0.0), c(0.3, 0.3), c(-1.0, 0.0), c(0.0, 2.0)],
        )
        .unwrap();
        let h = g.matmul(&g.adjoint());
        let ev = hermitian_eig(&h).unwrap().eigenvalues;
        let sv = singular_values(&h);
        for (a, b) in ev.iter().zip(&sv) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn arb_matrix() -> impl Strategy<Value = ComplexMatrix> {
        (1usize..6, 1usize..6, 0usize..4).prop_flat_map(|(r, cc, rank)| {
            let rank = rank.min(r).min(cc);
            (
                proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), r * rank.max(1)),
                proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rank.max(1) * cc),
            )
                .prop_map(move |(a, b)| {
                    let k = rank.max(1);
                    let a = ComplexMatrix::from_row_major(
                        r,
                        k,
                        a.into_iter().map(|(x, y)| c(x, y)).collect(),
                    )
                    .unwrap();
                    let b = ComplexMatrix::from_row_major(
                        k,
                        cc,
                        b.into_iter().map(|(x, y)| c(x, y)).collect(),
                    )
                    .unwrap();
                    let m = a.matmul(&b);
                    if rank == 0 {
                        ComplexMatrix::zeros(r, cc)
                    } else {
                        m
                    }
                })
        })
    }

    proptest! {
        #[test]
        fn rank_invariant_under_adjoint_and_scaling(m in arb_matrix(), re in -3.0f64..3.0, im in -3.0f64..3.0, ex in -6i32..=6) {
            let tol = ToleranceConfig::default();
            let r = numerical_rank(&m, &tol);
            prop_assert_eq!(r, numerical_rank(&m.adjoint(), &tol));
            let z = c(re, im);
            prop_assume!(z.norm() > 0.1);
            let s = z / z.norm() * 10f64.powi(ex);
            prop_assert_eq!(r, numerical_rank(&m.scale(s), &tol));
        }

        #[test]
        fn null_space_complements_rank(m in arb_matrix()) {
            let tol = ToleranceConfig::default();
            let ns = null_space(&m, &tol);
            prop_assert_eq!(ns.len() + numerical_rank(&m, &tol), m.cols());
            let sv = singular_values(&m);
            let thr = tol.threshold_for(&m, &sv);
            for (i, b) in ns.iter().enumerate() {
                prop_assert!((vec_norm(b) - 1.0).abs() < 1e-12);
                prop_assert!(vec_norm(&m.matvec(b)) <= thr);
                for other in &ns[i + 1..] {
                    prop_assert!(inner(b, other).norm() < 1e-12);
                }
            }
        }
    }
}
