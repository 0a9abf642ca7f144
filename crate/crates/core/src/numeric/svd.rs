//! One-sided (Hestenes) Jacobi SVD.
//!
//! Columns of the working matrix are rotated pairwise until mutually
//! orthogonal; the column norms are then the singular values. Small singular
//! values come out with high relative accuracy, which the locus searches rely
//! on when driving σ_{k+1} towards zero.

use num_complex::Complex64;

use super::matrix::{c, complete_orthonormal, inner, vec_norm, ComplexMatrix};

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Nonincreasing, length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    /// Full `rows × rows` unitary.
    pub left_vectors: ComplexMatrix,
    /// Full `cols × cols` unitary.
    pub right_vectors: ComplexMatrix,
}

impl SvdResult {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// ‖M − U Σ V†‖_F
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> f64 {
        let mut acc = 0.0;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let mut z = c(0.0, 0.0);
                for (k, &s) in self.singular_values.iter().enumerate() {
                    z += self.left_vectors[(i, k)] * s * self.right_vectors[(j, k)].conj();
                }
                acc += (m[(i, j)] - z).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

pub fn svd(m: &ComplexMatrix) -> SvdResult {
    if m.rows() >= m.cols() {
        let (u, s, v) = jacobi_tall(m);
        SvdResult {
            singular_values: s,
            left_vectors: u,
            right_vectors: v,
        }
    } else {
        // M† = U' Σ V'†  ⇒  M = V' Σ U'†
        let (u, s, v) = jacobi_tall(&m.adjoint());
        SvdResult {
            singular_values: s,
            left_vectors: v,
            right_vectors: u,
        }
    }
}

/// Singular values only.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    svd(m).singular_values
}

/// Requires rows ≥ cols. Returns (U full rows×rows, σ, V full cols×cols).
fn jacobi_tall(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let rows = m.rows();
    let cols = m.cols();
    // column-major working copies
    let mut w: Vec<Vec<Complex64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| {
            let mut e = vec![c(0.0, 0.0); cols];
            e[j] = c(1.0, 0.0);
            e
        })
        .collect();
    let tol = f64::EPSILON * (rows as f64).sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&w[p], &w[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                // w_q ← w_q·conj(phase) makes <w_p, w_q> real, then a real rotation
                let (wp, wq) = pair_mut(&mut w, p, q);
                rotate_pair(wp, wq, cs, sn, phase.conj());
                let (vp, vq) = pair_mut(&mut v, p, q);
                rotate_pair(vp, vq, cs, sn, phase.conj());
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = w.iter().map(|col| vec_norm(col)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let mut left = Vec::with_capacity(rows);
    for &i in &order {
        // columns at roundoff level carry no direction; complete them instead
        if norms[i] > smax * 1e-30 && norms[i] > 1e-290 {
            left.push(w[i].iter().map(|z| z / norms[i]).collect::<Vec<_>>());
        } else {
            break;
        }
    }
    let left = complete_orthonormal(left, rows, rows);
    let right: Vec<Vec<Complex64>> = order.iter().map(|&i| v[i].clone()).collect();
    (
        ComplexMatrix::from_columns(&left),
        sigma,
        ComplexMatrix::from_columns(&right),
    )
}

fn pair_mut<T>(xs: &mut [T], p: usize, q: usize) -> (&mut T, &mut T) {
    debug_assert!(p < q);
    let (lo, hi) = xs.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

fn rotate_pair(xp: &mut [Complex64], xq: &mut [Complex64], cs: f64, sn: f64, phase: Complex64) {
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bq = *b * phase;
        let ap = *a;
        *a = ap * cs - bq * sn;
        *b = ap * sn + bq * cs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::from_row_major(rows, cols, data).unwrap()
    }

    fn assert_unitary(u: &ComplexMatrix) {
        let n = u.cols();
        let g = u.adjoint().matmul(u);
        assert!(
            g.sub(&ComplexMatrix::identity(n)).frobenius_norm() < 1e-12,
            "not unitary"
        );
    }

    #[test]
    fn zero_and_diagonal() {
        let s = svd(&ComplexMatrix::zeros(3, 2));
        assert_eq!(s.singular_values, vec![0.0, 0.0]);
        assert_unitary(&s.left_vectors);
        assert_unitary(&s.right_vectors);
        let s = svd(&ComplexMatrix::diag_real(&[3.0, 1.0]));
        assert_eq!(s.singular_values, vec![3.0, 1.0]);
    }

    #[test]
    fn column_vector_norm() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0], &[1.0]]);
        let s = svd(&m).singular_values;
        assert_eq!(s.len(), 1);
        assert!((s[0] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn random_shapes_reconstruct() {
        let shapes = [(4, 4), (6, 3), (3, 7), (1, 5), (5, 1), (9, 2), (2, 9)];
        for (k, &(r, cc)) in shapes.iter().enumerate() {
            let m = random_matrix(r, cc, k as u64);
            let s = svd(&m);
            assert!(s.reconstruction_residual(&m) <= 1e-10 * (1.0 + m.frobenius_norm()));
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
            assert_eq!(s.singular_values.len(), r.min(cc));
            assert_unitary(&s.left_vectors);
            assert_unitary(&s.right_vectors);
        }
    }

    #[test]
    fn rank_deficient_keeps_unitary_factors() {
        // rank-1 outer product
        let a = random_matrix(4, 1, 3);
        let b = random_matrix(1, 5, 4);
        let m = a.matmul(&b);
        let s = svd(&m);
        assert!(s.singular_values[1] < 1e-14 * s.singular_values[0]);
        assert_unitary(&s.left_vectors);
        assert_unitary(&s.right_vectors);
        assert!(s.reconstruction_residual(&m) <= 1e-12);
    }

    #[test]
    fn tiny_singular_values_are_resolved() {
        let m = ComplexMatrix::diag_real(&[1.0, 1e-13, 1e-17]);
        let u = random_matrix(3, 3, 11);
        let q = svd(&u).left_vectors;
        let mm = q.matmul(&m).matmul(&q.adjoint());
        let s = svd(&mm).singular_values;
        assert!((s[1] - 1e-13).abs() < 1e-15);
        assert!(s[2] < 1e-15);
    }
}
