//! Bipartite state model.
//!
//! Amplitudes use the basis order |11>,…,|1n>,…,|m1>,…,|mn>: the amplitude of
//! |ij> (one-based) lives at index `(i−1)·n + (j−1)`. Every matrix in the
//! crate uses the same order, so the n×n blocks `ρ_ij` of a density matrix
//! are the contiguous sub-blocks at `(i·n, j·n)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{
    hermitian_eig, inner, numerical_rank, svd, vec_norm, Complex64, ComplexMatrix, NumericError,
    ToleranceConfig,
};

const WEIGHT_SUM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("amplitude vector is zero")]
    ZeroVector,
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("weights must be positive and finite (got {0})")]
    NonPositiveWeight(f64),
    #[error("weights sum to {0}, expected 1")]
    WeightSumInvalid(f64),
    #[error("ensemble has no members")]
    EmptyEnsemble,
    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix has eigenvalue {0:e} below zero")]
    NotPositive(f64),
    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

pub type Result<T> = std::result::Result<T, StateError>;

/// Which tensor factor an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteShape {
    pub m: usize,
    pub n: usize,
}

impl BipartiteShape {
    pub fn new(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "bipartite dimensions must be at least 1");
        Self { m, n }
    }

    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    /// Dimension of the given side.
    pub fn side_dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.m,
            Side::B => self.n,
        }
    }

    /// Zero-based index of |ij>.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    fn check(&self, other: &BipartiteShape) -> Result<()> {
        if self != other {
            return Err(StateError::ShapeMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for BipartiteShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

/// Normalized vector in `H_A^m ⊗ H_B^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    shape: BipartiteShape,
    amplitudes: Vec<Complex64>,
}

pub fn make_pure(raw: &[Complex64], shape: BipartiteShape) -> Result<PureState> {
    PureState::new(raw, shape)
}

impl PureState {
    pub fn new(raw: &[Complex64], shape: BipartiteShape) -> Result<Self> {
        if raw.len() != shape.dim() {
            return Err(StateError::ShapeMismatch {
                expected: format!("{} amplitudes", shape.dim()),
                found: format!("{} amplitudes", raw.len()),
            });
        }
        if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NumericError::NonFinite.into());
        }
        let nrm = vec_norm(raw);
        if nrm == 0.0 {
            return Err(StateError::ZeroVector);
        }
        Ok(Self {
            shape,
            amplitudes: raw.iter().map(|z| z / nrm).collect(),
        })
    }

    /// Convenience for real amplitude lists.
    pub fn from_real(raw: &[f64], shape: BipartiteShape) -> Result<Self> {
        let v: Vec<Complex64> = raw.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(&v, shape)
    }

    /// Superposition of basis kets given as one-based `(i, j, coefficient)`.
    pub fn from_kets(kets: &[(usize, usize, f64)], shape: BipartiteShape) -> Result<Self> {
        let mut v = vec![Complex64::new(0.0, 0.0); shape.dim()];
        for &(i, j, a) in kets {
            assert!(i >= 1 && i <= shape.m && j >= 1 && j <= shape.n, "ket |{i}{j}> out of range");
            v[shape.index(i - 1, j - 1)] += a;
        }
        Self::new(&v, shape)
    }

    /// `a ⊗ b` for local vectors of length m and n.
    pub fn product(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        let shape = BipartiteShape::new(a.len(), b.len());
        let v: Vec<Complex64> = a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect();
        Self::new(&v, shape)
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The m×n matrix `(a_ij)`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_row_major(self.shape.m, self.shape.n, self.amplitudes.clone())
            .expect("amplitude count matches shape")
    }

    pub fn projector(&self) -> DensityMatrix {
        let d = self.shape.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix {
            shape: self.shape,
            matrix: m,
        }
    }
}

/// Schmidt form `v = Σ a_i e_i ⊗ e'_i`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub left_basis: Vec<Vec<Complex64>>,
    pub right_basis: Vec<Vec<Complex64>>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self, shape: BipartiteShape) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); shape.dim()];
        for k in 0..self.rank {
            for i in 0..shape.m {
                for j in 0..shape.n {
                    v[shape.index(i, j)] +=
                        self.left_basis[k][i] * self.right_basis[k][j] * self.coefficients[k];
                }
            }
        }
        v
    }
}

pub fn schmidt(psi: &PureState, tol: &ToleranceConfig) -> SchmidtDecomposition {
    let c = psi.coefficient_matrix();
    let s = svd(&c);
    let thr = tol.threshold_for(&c, &s.singular_values);
    let rank = s.singular_values.iter().filter(|&&x| x > thr).count();
    // C = U Σ V†, so C_ij = Σ σ_k U_ik conj(V_jk)
    SchmidtDecomposition {
        coefficients: s.singular_values[..rank].to_vec(),
        rank,
        left_basis: (0..rank).map(|k| s.left_vectors.column(k)).collect(),
        right_basis: (0..rank)
            .map(|k| s.right_vectors.column(k).iter().map(|z| z.conj()).collect())
            .collect(),
    }
}

/// Schmidt rank alone.
pub fn schmidt_rank(psi: &PureState, tol: &ToleranceConfig) -> usize {
    numerical_rank(&psi.coefficient_matrix(), tol)
}

/// Weighted pure states `{p_l, v_l}` with `Σ p_l = 1`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    shape: BipartiteShape,
    members: Vec<(f64, PureState)>,
    normalized: bool,
}

impl Ensemble {
    /// Weights may be unnormalized; they are rescaled to unit sum and the
    /// rescaling is recorded in [`Ensemble::was_normalized`].
    pub fn new(shape: BipartiteShape, members: Vec<(f64, PureState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(StateError::EmptyEnsemble);
        }
        for (p, s) in &members {
            if !(p.is_finite() && *p > 0.0) {
                return Err(StateError::NonPositiveWeight(*p));
            }
            shape.check(&s.shape)?;
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        let normalized = (total - 1.0).abs() > WEIGHT_SUM_TOL;
        let members = if normalized {
            members.into_iter().map(|(p, s)| (p / total, s)).collect()
        } else {
            members
        };
        Ok(Self {
            shape,
            members,
            normalized,
        })
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn was_normalized(&self) -> bool {
        self.normalized
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|(p, _)| *p).collect()
    }
}

/// Hermitian, positive semidefinite, unit-trace operator on `H_A^m ⊗ H_B^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    shape: BipartiteShape,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the matrix. Eigenvalues in `[−1e-10, 0)` are clamped to 0.
    pub fn new(shape: BipartiteShape, matrix: ComplexMatrix) -> Result<Self> {
        let d = shape.dim();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(StateError::ShapeMismatch {
                expected: format!("{d}x{d} matrix"),
                found: format!("{}x{} matrix", matrix.rows(), matrix.cols()),
            });
        }
        let defect = matrix.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(StateError::NotHermitian(defect));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(StateError::TraceNotOne(tr));
        }
        let matrix = matrix.add(&matrix.adjoint()).scale(Complex64::new(0.5, 0.0));
        let eig = hermitian_eig(&matrix)?;
        let lmin = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if lmin < -PSD_TOL {
            return Err(StateError::NotPositive(lmin));
        }
        let matrix = if lmin < 0.0 {
            let v = &eig.eigenvectors;
            let clamped: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
            let vd = ComplexMatrix::from_columns(
                &(0..d)
                    .map(|k| v.column(k).iter().map(|z| z * clamped[k]).collect())
                    .collect::<Vec<_>>(),
            );
            vd.matmul(&v.adjoint())
        } else {
            matrix
        };
        Ok(Self { shape, matrix })
    }

    /// Rescales by the trace before validating.
    pub fn new_unnormalized(shape: BipartiteShape, matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(StateError::TraceNotOne(tr));
        }
        Self::new(shape, matrix.scale(Complex64::new(1.0 / tr, 0.0)))
    }

    pub fn maximally_mixed(shape: BipartiteShape) -> Self {
        let d = shape.dim();
        Self {
            shape,
            matrix: ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0)),
        }
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues, nonincreasing.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix)
            .expect("density matrices are Hermitian")
            .eigenvalues
    }

    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        numerical_rank(&self.matrix, tol)
    }

    /// The n×n block `ρ_ij` (zero-based i, j).
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        let n = self.shape.n;
        self.matrix.block(i * n, j * n, n, n)
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn conjugate_local(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> Self {
        assert_eq!(u.rows(), self.shape.m);
        assert_eq!(v.rows(), self.shape.n);
        let w = u.kron(v);
        Self {
            shape: self.shape,
            matrix: w.matmul(&self.matrix).matmul(&w.adjoint()),
        }
    }

    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.matrix.sub(&other.matrix).frobenius_norm()
    }
}

/// `A P A†`, i.e. `Σ p_l |v_l><v_l|`.
pub fn density_from_ensemble(e: &Ensemble) -> DensityMatrix {
    let d = e.shape.dim();
    let mut m = ComplexMatrix::zeros(d, d);
    for (p, s) in &e.members {
        let a = s.amplitudes();
        for i in 0..d {
            let ai = a[i] * *p;
            for j in 0..d {
                m[(i, j)] += ai * a[j].conj();
            }
        }
    }
    DensityMatrix {
        shape: e.shape,
        matrix: m,
    }
}

/// Spectral ensemble: eigenvectors with eigenvalues above the rank threshold.
pub fn eigen_ensemble(rho: &DensityMatrix, tol: &ToleranceConfig) -> Ensemble {
    let eig = hermitian_eig(&rho.matrix).expect("density matrices are Hermitian");
    let d = rho.shape.dim();
    let thr = tol.threshold(eig.eigenvalues[0].abs(), d, d);
    let members: Vec<(f64, PureState)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam > thr)
        .map(|(k, &lam)| {
            let v = eig.eigenvectors.column(k);
            (lam, PureState::new(&v, rho.shape).expect("eigenvectors are unit vectors"))
        })
        .collect();
    Ensemble::new(rho.shape, members).expect("a unit-trace state has a positive eigenvalue")
}

/// Convex combination `Σ w_i ρ_i`.
pub fn mix(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
    if weights.len() != states.len() {
        return Err(StateError::ShapeMismatch {
            expected: format!("{} weights", states.len()),
            found: format!("{} weights", weights.len()),
        });
    }
    let first = states.first().ok_or(StateError::EmptyEnsemble)?;
    for &w in weights {
        if !(w.is_finite() && w > 0.0) {
            return Err(StateError::NonPositiveWeight(w));
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(StateError::WeightSumInvalid(total));
    }
    let d = first.shape.dim();
    let mut m = ComplexMatrix::zeros(d, d);
    for (&w, s) in weights.iter().zip(states) {
        first.shape.check(&s.shape)?;
        m.axpy(Complex64::new(w, 0.0), &s.matrix);
    }
    Ok(DensityMatrix {
        shape: first.shape,
        matrix: m,
    })
}

/// `side = A` traces out A and returns the n×n operator on B; `side = B`
/// returns the m×m operator on A.
pub fn partial_trace(rho: &DensityMatrix, side: Side) -> ComplexMatrix {
    let BipartiteShape { m, n } = rho.shape;
    let x = &rho.matrix;
    match side {
        Side::A => {
            let mut out = ComplexMatrix::zeros(n, n);
            for b in 0..n {
                for b2 in 0..n {
                    out[(b, b2)] = (0..m).map(|i| x[(i * n + b, i * n + b2)]).sum();
                }
            }
            out
        }
        Side::B => {
            let mut out = ComplexMatrix::zeros(m, m);
            for a in 0..m {
                for a2 in 0..m {
                    out[(a, a2)] = (0..n).map(|j| x[(a * n + j, a2 * n + j)]).sum();
                }
            }
            out
        }
    }
}

fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Normalized vector of independent standard complex Gaussians.
pub fn random_pure(shape: BipartiteShape, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v = gaussian_vector(&mut rng, shape.dim());
        if let Ok(s) = PureState::new(&v, shape) {
            return s;
        }
    }
}

/// Rank-r ensemble: Gaussian vectors orthonormalized, weights from the flat
/// simplex. Degenerate draws (rank below r numerically) are redrawn.
pub fn random_ensemble(shape: BipartiteShape, rank: usize, seed: u64) -> Result<Ensemble> {
    let d = shape.dim();
    if rank == 0 || rank > d {
        return Err(StateError::RankOutOfRange { rank, max: d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = ToleranceConfig::default();
    loop {
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
        for _ in 0..rank {
            let mut v = gaussian_vector(&mut rng, d);
            for _ in 0..2 {
                for b in &basis {
                    let proj = inner(b, &v);
                    v.iter_mut().zip(b).for_each(|(x, &y)| *x -= proj * y);
                }
            }
            let nrm = vec_norm(&v);
            if nrm < 1e-8 {
                break;
            }
            v.iter_mut().for_each(|x| *x /= nrm);
            basis.push(v);
        }
        if basis.len() < rank {
            continue;
        }
        let raw: Vec<f64> = (0..rank).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        let members = raw
            .iter()
            .zip(basis)
            .map(|(&w, v)| Ok((w / total, PureState::new(&v, shape)?)))
            .collect::<Result<Vec<_>>>()?;
        let e = Ensemble::new(shape, members)?;
        if density_from_ensemble(&e).rank(&tol) == rank {
            return Ok(e);
        }
    }
}

pub fn random_density(shape: BipartiteShape, rank: usize, seed: u64) -> Result<DensityMatrix> {
    Ok(density_from_ensemble(&random_ensemble(shape, rank, seed)?))
}

/// Haar-distributed unitary from the QR of a Ginibre matrix.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = gaussian_vector(&mut rng, dim);
        for _ in 0..2 {
            for b in &cols {
                let proj = inner(b, &v);
                v.iter_mut().zip(b).for_each(|(x, &y)| *x -= proj * y);
            }
        }
        let nrm = vec_norm(&v);
        if nrm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nrm);
            cols.push(v);
        }
    }
    ComplexMatrix::from_columns(&cols)
}
