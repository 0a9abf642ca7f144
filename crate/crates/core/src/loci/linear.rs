use serde::{Deserialize, Serialize};

use super::{Pencil, ProjectivePoint};
use crate::numeric::{inner, null_space, vec_norm, Complex64, ToleranceConfig};

/// `V^0` as a projective linear subspace: `{r : Σ r_i A_i = 0}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearLocus {
    pub basis: Vec<Vec<Complex64>>,
    /// `basis.len() − 1`; −1 for the empty locus.
    pub projective_dimension: isize,
}

impl LinearLocus {
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Basis vectors as canonical projective points.
    pub fn points(&self) -> Vec<ProjectivePoint> {
        self.basis
            .iter()
            .map(|b| ProjectivePoint::new(b).expect("basis vectors are unit vectors"))
            .collect()
    }

    /// Distance of the point from the subspace, as `1 − ‖P r‖` for unit `r`.
    pub fn distance(&self, point: &ProjectivePoint) -> f64 {
        let r = point.coords();
        let mut proj = vec![Complex64::new(0.0, 0.0); r.len()];
        for b in &self.basis {
            let c = inner(b, r);
            proj.iter_mut().zip(b).for_each(|(p, &x)| *p += c * x);
        }
        (1.0 - vec_norm(&proj)).max(0.0)
    }

    pub fn contains(&self, point: &ProjectivePoint) -> bool {
        self.distance(point) <= super::POINT_TOL
    }
}

/// Exact `V^0`: rank ≤ 0 means every entry vanishes, a linear condition on r.
pub fn locus_zero(p: &Pencil, tol: &ToleranceConfig) -> LinearLocus {
    let basis = null_space(&p.stacked(), tol);
    LinearLocus {
        projective_dimension: basis.len() as isize - 1,
        basis,
    }
}
