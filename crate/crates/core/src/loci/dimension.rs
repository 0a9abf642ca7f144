//! Local dimension of `V^k` at a point from the Jacobian of its defining
//! (k+1)×(k+1) minors.

use super::{in_locus, LociError, Pencil, ProjectivePoint, Result};
use crate::numeric::{complete_orthonormal, determinant, numerical_rank, svd, Complex64, ComplexMatrix, ToleranceConfig};

/// Above this many minors the Jacobian is taken from the trailing singular
/// block instead; both have the same row space at points of rank exactly k.
const MAX_MINORS: usize = 20_000;

/// Estimated projective dimension of `V^k` at the point: `ambient − 1` minus
/// the rank of the minors' Jacobian on the tangent space `r^⊥`.
///
/// The minors are holomorphic in r, so the complex rank of their Jacobian on
/// `r^⊥` equals half the real rank after quotienting out scaling and phase.
/// The value is an upper bound at singular points of the locus.
pub fn local_dimension(p: &Pencil, k: usize, point: &ProjectivePoint, tol: &ToleranceConfig) -> Result<isize> {
    p.check_point(point)?;
    if !in_locus(p, k, point, tol)? {
        return Err(LociError::NotOnLocus);
    }
    let dim = p.ambient_dim();
    if k >= p.max_rank() || p.is_zero() {
        return Ok(dim as isize - 1);
    }
    if k == 0 {
        // minors are the entries themselves; r lies in the kernel of the
        // stacked matrix, so its rank on r^⊥ is its full rank
        return Ok(dim as isize - 1 - numerical_rank(&p.stacked(), tol) as isize);
    }

    let r = point.coords();
    let m = p.evaluate(r);
    let tangent: Vec<Vec<Complex64>> = complete_orthonormal(vec![r.to_vec()], dim, dim)
        .into_iter()
        .skip(1)
        .collect();
    let tangent_blocks: Vec<ComplexMatrix> = tangent.iter().map(|t| p.evaluate(t)).collect();

    let n_minors = binomial(p.rows(), k + 1).saturating_mul(binomial(p.cols(), k + 1));
    let jac = if n_minors <= MAX_MINORS {
        minors_jacobian(&m, &tangent_blocks, k + 1)
    } else {
        if numerical_rank(&m, tol) < k {
            // every (k+1)-minor vanishes to second order here
            return Ok(dim as isize - 1);
        }
        tail_jacobian(&m, &tangent_blocks, k)
    };

    // Jacobian entries scale like ‖M‖^k · ‖A‖; entries at that scale times
    // √rank_rel_tol are treated as zero, which absorbs the O(ε) error of a
    // point that is only numerically on the locus.
    let block_scale = tangent_blocks.iter().map(|b| b.frobenius_norm()).fold(0.0, f64::max);
    let msize = svd(&m).sigma_max().max(block_scale);
    let scale = msize.powi(k as i32) * block_scale;
    let sv = svd(&jac).singular_values;
    let thr = tol
        .threshold_for(&jac, &sv)
        .max(tol.rank_rel_tol.sqrt() * scale);
    let rank = sv.iter().filter(|&&s| s > thr).count();
    Ok(dim as isize - 1 - rank as isize)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Row per minor, column per tangent direction: d/dε det((M + εT)_S).
fn minors_jacobian(m: &ComplexMatrix, tangent_blocks: &[ComplexMatrix], size: usize) -> ComplexMatrix {
    let row_sets = combinations(m.rows(), size);
    let col_sets = combinations(m.cols(), size);
    let mut jac = ComplexMatrix::zeros(row_sets.len() * col_sets.len(), tangent_blocks.len());
    let mut row = 0;
    for rs in &row_sets {
        for cs in &col_sets {
            let sub = m.select(rs, cs);
            for (t, tb) in tangent_blocks.iter().enumerate() {
                let dsub = tb.select(rs, cs);
                // Jacobi's formula as a sum of column replacements
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..size {
                    let mut rep = sub.clone();
                    for i in 0..size {
                        rep[(i, j)] = dsub[(i, j)];
                    }
                    acc += determinant(&rep);
                }
                jac[(row, t)] = acc;
            }
            row += 1;
        }
    }
    jac
}

fn tail_jacobian(m: &ComplexMatrix, tangent_blocks: &[ComplexMatrix], k: usize) -> ComplexMatrix {
    let s = svd(m);
    let (rows, cols) = (m.rows(), m.cols());
    let ut = s.left_vectors.block(0, k, rows, rows - k).adjoint();
    let vt = s.right_vectors.block(0, k, cols, cols - k);
    let mut jac = ComplexMatrix::zeros((rows - k) * (cols - k), tangent_blocks.len());
    for (t, tb) in tangent_blocks.iter().enumerate() {
        let d = ut.matmul(tb).matmul(&vt);
        for (e, &z) in d.as_slice().iter().enumerate() {
            jac[(e, t)] = z;
        }
    }
    jac
}
