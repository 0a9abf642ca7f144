//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use super::matrix::{c, ComplexMatrix};
use super::{NumericError, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in nonincreasing order with the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigResult {
    /// ‖H V − V diag(λ)‖_F
    pub fn residual(&self, h: &ComplexMatrix) -> f64 {
        let hv = h.matmul(&self.eigenvectors);
        let mut acc = 0.0;
        for i in 0..hv.rows() {
            for (j, &lam) in self.eigenvalues.iter().enumerate() {
                acc += (hv[(i, j)] - self.eigenvectors[(i, j)] * lam).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigResult> {
    if !h.is_square() {
        return Err(NumericError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let defect = h.hermitian_defect();
    if defect > 1e-10 * (1.0 + h.frobenius_norm()) {
        return Err(NumericError::NotHermitian(defect));
    }

    let n = h.rows();
    // symmetrize so that rounding in the input cannot leak into the sweep
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = c(h[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(EigResult {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi step annihilating `a[p][q]`. The unitary is
/// `J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` with `a[p][q] = |a[p][q]| e^{iφ}`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / g;
    let tau = (aqq - app) / (2.0 * g);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;

    // J entries: J[p][p]=c, J[p][q]=s, J[q][p]=-s·conj(phase), J[q][q]=c·conj(phase)
    let jpp = c(cs, 0.0);
    let jpq = c(sn, 0.0);
    let jqp = phase.conj() * (-sn);
    let jqq = phase.conj() * cs;

    let n = a.rows();
    // A ← A J (columns)
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * jpp + aiq * jqp;
        a[(i, q)] = aip * jpq + aiq * jqq;
    }
    // A ← J† A (rows)
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = jpp.conj() * apj + jqp.conj() * aqj;
        a[(q, j)] = jpq.conj() * apj + jqq.conj() * aqj;
    }
    a[(p, q)] = c(0.0, 0.0);
    a[(q, p)] = c(0.0, 0.0);
    a[(p, p)] = c(a[(p, p)].re, 0.0);
    a[(q, q)] = c(a[(q, q)].re, 0.0);
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        g.add(&g.adjoint())
    }

    #[test]
    fn identity_and_diagonal() {
        let e = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        let e = hermitian_eig(&ComplexMatrix::diag_real(&[2.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 1.0]);
        assert_eq!(e.eigenvectors, ComplexMatrix::identity(2));
    }

    #[test]
    fn random_hermitian_reconstructs() {
        for seed in 0..20 {
            let h = random_hermitian(4, seed);
            let e = hermitian_eig(&h).unwrap();
            assert!(e.residual(&h) < 1e-10 * (1.0 + h.frobenius_norm()));
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            let vtv = e.eigenvectors.adjoint().matmul(&e.eigenvectors);
            assert!(vtv.sub(&ComplexMatrix::identity(4)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn larger_matrix_converges() {
        let h = random_hermitian(36, 7);
        let e = hermitian_eig(&h).unwrap();
        assert!(e.residual(&h) < 1e-10 * (1.0 + h.frobenius_norm()));
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&m), Err(NumericError::NotHermitian(_))));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&r), Err(NumericError::NotSquare { .. })));
    }
}
