use serde::{Deserialize, Serialize};

use super::{LociError, ProjectivePoint, Result};
use crate::numeric::{svd, Complex64, ComplexMatrix, ToleranceConfig};
use crate::states::{eigen_ensemble, DensityMatrix, Ensemble, Side};

/// How a pencil was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PencilSource {
    /// From a caller-supplied ensemble.
    Ensemble,
    /// From the spectral decomposition of a density matrix.
    Hermitian,
}

/// The linear family `r ↦ Σ r_i A_i`.
///
/// For side A the blocks `A_1, …, A_m` are n×t: column l of `A_w` holds the
/// amplitudes `a_{w j l}`, j = 1..n, of the l-th ensemble vector. Side B swaps
/// the roles of the two factors.
#[derive(Debug, Clone)]
pub struct Pencil {
    side: Side,
    rows: usize,
    cols: usize,
    blocks: Vec<ComplexMatrix>,
    source: PencilSource,
}

impl Pencil {
    pub fn from_blocks(side: Side, blocks: Vec<ComplexMatrix>, source: PencilSource) -> Result<Self> {
        let first = blocks.first().ok_or(LociError::EmptyPencil)?;
        let (rows, cols) = (first.rows(), first.cols());
        if cols == 0 || rows == 0 {
            return Err(LociError::EmptyPencil);
        }
        for b in &blocks {
            if b.rows() != rows || b.cols() != cols {
                return Err(LociError::DimensionMismatch {
                    expected: rows * cols,
                    found: b.rows() * b.cols(),
                });
            }
        }
        Ok(Self {
            side,
            rows,
            cols,
            blocks,
            source,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Dimension of the coordinate space (m for side A).
    pub fn ambient_dim(&self) -> usize {
        self.blocks.len()
    }

    /// Rows of each block (n for side A).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of ensemble vectors t.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn source(&self) -> PencilSource {
        self.source
    }

    /// Largest rank any evaluation can have.
    pub fn max_rank(&self) -> usize {
        self.rows.min(self.cols)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.max_abs() == 0.0)
    }

    /// `Σ r_i A_i` at raw coordinates.
    pub fn evaluate(&self, r: &[Complex64]) -> ComplexMatrix {
        assert_eq!(r.len(), self.blocks.len(), "coordinate count");
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for (&ri, b) in r.iter().zip(&self.blocks) {
            if ri.re != 0.0 || ri.im != 0.0 {
                out.axpy(ri, b);
            }
        }
        out
    }

    pub fn evaluate_at(&self, point: &ProjectivePoint) -> Result<ComplexMatrix> {
        self.check_point(point)?;
        Ok(self.evaluate(point.coords()))
    }

    /// The `(rows·cols) × ambient` matrix whose column i is `A_i` flattened.
    pub fn stacked(&self) -> ComplexMatrix {
        let mut n = ComplexMatrix::zeros(self.rows * self.cols, self.blocks.len());
        for (i, b) in self.blocks.iter().enumerate() {
            for (e, &z) in b.as_slice().iter().enumerate() {
                n[(e, i)] = z;
            }
        }
        n
    }

    pub(crate) fn check_point(&self, point: &ProjectivePoint) -> Result<()> {
        if point.dim() != self.blocks.len() {
            return Err(LociError::DimensionMismatch {
                expected: self.blocks.len(),
                found: point.dim(),
            });
        }
        Ok(())
    }
}

pub fn pencil_from_ensemble(e: &Ensemble, side: Side) -> Pencil {
    let shape = e.shape();
    let t = e.len();
    let (ambient, rows) = match side {
        Side::A => (shape.m, shape.n),
        Side::B => (shape.n, shape.m),
    };
    let mut blocks = vec![ComplexMatrix::zeros(rows, t); ambient];
    for (l, (_, state)) in e.members().iter().enumerate() {
        let a = state.amplitudes();
        for i in 0..shape.m {
            for j in 0..shape.n {
                let z = a[shape.index(i, j)];
                match side {
                    Side::A => blocks[i][(j, l)] = z,
                    Side::B => blocks[j][(i, l)] = z,
                }
            }
        }
    }
    Pencil::from_blocks(side, blocks, PencilSource::Ensemble).expect("ensembles are nonempty")
}

/// Pencil of the spectral ensemble of ρ.
pub fn pencil_from_state(rho: &DensityMatrix, side: Side, tol: &ToleranceConfig) -> Pencil {
    let mut p = pencil_from_ensemble(&eigen_ensemble(rho, tol), side);
    p.source = PencilSource::Hermitian;
    p
}

/// `Σ_{i,j} r_i r_j* ρ_ij` for side A (an n×n matrix built from the n×n
/// blocks of ρ); the side-B form contracts the second factor instead.
pub fn hermitian_form(rho: &DensityMatrix, point: &ProjectivePoint, side: Side) -> Result<ComplexMatrix> {
    let shape = rho.shape();
    let ambient = shape.side_dim(side);
    if point.dim() != ambient {
        return Err(LociError::DimensionMismatch {
            expected: ambient,
            found: point.dim(),
        });
    }
    let r = point.coords();
    let x = rho.matrix();
    let (m, n) = (shape.m, shape.n);
    let out = match side {
        Side::A => {
            let mut out = ComplexMatrix::zeros(n, n);
            for i in 0..m {
                for j in 0..m {
                    let w = r[i] * r[j].conj();
                    for a in 0..n {
                        for b in 0..n {
                            out[(a, b)] += w * x[(i * n + a, j * n + b)];
                        }
                    }
                }
            }
            out
        }
        Side::B => {
            let mut out = ComplexMatrix::zeros(m, m);
            for a in 0..n {
                for b in 0..n {
                    let w = r[a] * r[b].conj();
                    for i in 0..m {
                        for j in 0..m {
                            out[(i, j)] += w * x[(i * n + a, j * n + b)];
                        }
                    }
                }
            }
            out
        }
    };
    Ok(out)
}

/// σ_{k+1} of the evaluation and the membership threshold for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub sigma: f64,
    pub threshold: f64,
}

/// σ_{k+1}(Σ r_i A_i) at the point, zero when `k ≥ max_rank`.
pub fn residual_at(p: &Pencil, k: usize, point: &ProjectivePoint, tol: &ToleranceConfig) -> Result<Residual> {
    let m = p.evaluate_at(point)?;
    let sv = svd(&m).singular_values;
    Ok(Residual {
        sigma: sv.get(k).copied().unwrap_or(0.0),
        threshold: tol.threshold_for(&m, &sv),
    })
}

pub fn rank_at(p: &Pencil, point: &ProjectivePoint, tol: &ToleranceConfig) -> Result<usize> {
    let m = p.evaluate_at(point)?;
    let sv = svd(&m).singular_values;
    let thr = tol.threshold_for(&m, &sv);
    Ok(sv.iter().filter(|&&s| s > thr).count())
}

pub fn in_locus(p: &Pencil, k: usize, point: &ProjectivePoint, tol: &ToleranceConfig) -> Result<bool> {
    Ok(rank_at(p, point, tol)? <= k)
}
