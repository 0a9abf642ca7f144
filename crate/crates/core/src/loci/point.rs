use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{LociError, Result};
use crate::numeric::{inner, vec_norm, Complex64, ComplexMatrix};

/// Two points are the same projective point when `1 − |<p, q>| ≤ POINT_TOL`.
pub const POINT_TOL: f64 = 1e-9;

/// Homogeneous coordinates `(r_1 : … : r_m)`, stored canonically: unit norm,
/// with the largest-modulus coordinate real and positive (lowest index wins
/// ties).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    coords: Vec<Complex64>,
}

impl ProjectivePoint {
    pub fn new(coords: &[Complex64]) -> Result<Self> {
        if coords.is_empty() {
            return Err(LociError::ZeroPoint);
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LociError::ZeroPoint);
        }
        let nrm = vec_norm(coords);
        if nrm == 0.0 {
            return Err(LociError::ZeroPoint);
        }
        let moduli: Vec<f64> = coords.iter().map(|z| z.norm() / nrm).collect();
        let top = moduli.iter().copied().fold(0.0, f64::max);
        let lead = moduli
            .iter()
            .position(|&x| x >= top - 1e-12)
            .expect("a maximum exists");
        let phase = coords[lead].conj() / coords[lead].norm();
        let mut out: Vec<Complex64> = coords.iter().map(|z| z * phase / nrm).collect();
        out[lead] = Complex64::new(out[lead].norm(), 0.0);
        Ok(Self { coords: out })
    }

    pub fn from_real(coords: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = coords.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(&v)
    }

    /// Standard basis point `e_i` (zero-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[i] = Complex64::new(1.0, 0.0);
        Self { coords: v }
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `1 − |<p, q>|`, zero for identical projective points.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        if self.dim() != other.dim() {
            return 1.0;
        }
        (1.0 - inner(&self.coords, &other.coords).norm()).max(0.0)
    }

    pub fn same_as(&self, other: &ProjectivePoint) -> bool {
        self.distance(other) <= POINT_TOL
    }

    /// Image under the linear map `r ↦ U r`.
    pub fn transform(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.cols() != self.dim() {
            return Err(LociError::DimensionMismatch {
                expected: u.cols(),
                found: self.dim(),
            });
        }
        Self::new(&u.matvec(&self.coords))
    }

    /// Canonical sort order: lexicographic on coordinate moduli, then on
    /// real and imaginary parts.
    pub fn canonical_cmp(&self, other: &ProjectivePoint) -> Ordering {
        let by_modulus = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.norm().total_cmp(&b.norm()))
            .find(|o| o.is_ne());
        if let Some(o) = by_modulus {
            return o;
        }
        self.coords
            .iter()
            .zip(&other.coords)
            .flat_map(|(a, b)| [a.re.total_cmp(&b.re), a.im.total_cmp(&b.im)])
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}
