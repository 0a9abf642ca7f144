//! JSON state files.
//!
//! ```json
//! {"m": 2, "n": 2, "ensemble": [{"p": 1, "amps": [[1,0],[0,0],[0,0],[1,0]]}]}
//! {"m": 1, "n": 2, "matrix": [[0.5,0],[0,0],[0,0],[0.5,0]]}
//! ```
//!
//! Amplitudes follow the basis order |11>, …, |mn>; matrices are row-major.
//! With `"normalize": true` (the default) amplitudes are rescaled to unit
//! norm, weights to unit sum and matrices to unit trace.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{Complex64, ComplexMatrix};
use crate::states::{density_from_ensemble, BipartiteShape, DensityMatrix, Ensemble, PureState, StateError};

const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed state file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid state file: {0}")]
    Invalid(String),
    #[error(transparent)]
    State(#[from] StateError),
}

pub type Result<T> = std::result::Result<T, StateFileError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEntry {
    pub p: f64,
    pub amps: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Vec<EnsembleEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_normalize")]
    pub normalize: bool,
}

fn default_normalize() -> bool {
    true
}

/// A parsed state; `ensemble` is present when the file gave one.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub density: DensityMatrix,
    pub ensemble: Option<Ensemble>,
}

fn complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

impl StateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| StateFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files serialize")
    }

    /// Matrix form of a density matrix, exactly as stored.
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let shape = rho.shape();
        Self {
            m: shape.m,
            n: shape.n,
            ensemble: None,
            matrix: Some(pairs(rho.matrix().as_slice())),
            normalize: false,
        }
    }

    pub fn from_ensemble(e: &Ensemble) -> Self {
        let shape = e.shape();
        Self {
            m: shape.m,
            n: shape.n,
            ensemble: Some(
                e.members()
                    .iter()
                    .map(|(p, s)| EnsembleEntry {
                        p: *p,
                        amps: pairs(s.amplitudes()),
                    })
                    .collect(),
            ),
            matrix: None,
            normalize: false,
        }
    }

    pub fn shape(&self) -> Result<BipartiteShape> {
        if self.m == 0 || self.n == 0 {
            return Err(StateFileError::Invalid(format!("dimensions must be at least 1 (m={}, n={})", self.m, self.n)));
        }
        Ok(BipartiteShape::new(self.m, self.n))
    }

    pub fn to_state(&self) -> Result<LoadedState> {
        let shape = self.shape()?;
        match (&self.ensemble, &self.matrix) {
            (Some(entries), None) => {
                let e = self.build_ensemble(shape, entries)?;
                Ok(LoadedState {
                    density: density_from_ensemble(&e),
                    ensemble: Some(e),
                })
            }
            (None, Some(values)) => Ok(LoadedState {
                density: self.build_matrix(shape, values)?,
                ensemble: None,
            }),
            _ => Err(StateFileError::Invalid(
                "exactly one of \"ensemble\" or \"matrix\" is required".into(),
            )),
        }
    }

    fn build_ensemble(&self, shape: BipartiteShape, entries: &[EnsembleEntry]) -> Result<Ensemble> {
        if entries.is_empty() {
            return Err(StateFileError::Invalid("ensemble has no members".into()));
        }
        let mut members = Vec::with_capacity(entries.len());
        for (idx, entry) in entries.iter().enumerate() {
            if entry.amps.len() != shape.dim() {
                return Err(StateFileError::Invalid(format!(
                    "member {idx}: expected {} amplitudes, found {}",
                    shape.dim(),
                    entry.amps.len()
                )));
            }
            if !(entry.p.is_finite() && entry.p > 0.0) {
                return Err(StateFileError::Invalid(format!("member {idx}: weight must be positive")));
            }
            let amps = complex(&entry.amps);
            if !self.normalize {
                let norm = crate::numeric::vec_norm(&amps);
                if (norm - 1.0).abs() > UNIT_TOL {
                    return Err(StateFileError::Invalid(format!(
                        "member {idx}: amplitude norm {norm} is not 1 and normalize is false"
                    )));
                }
            }
            members.push((entry.p, PureState::new(&amps, shape)?));
        }
        if !self.normalize {
            let total: f64 = entries.iter().map(|e| e.p).sum();
            if (total - 1.0).abs() > UNIT_TOL {
                return Err(StateFileError::Invalid(format!(
                    "weights sum to {total} and normalize is false"
                )));
            }
        }
        Ok(Ensemble::new(shape, members)?)
    }

    fn build_matrix(&self, shape: BipartiteShape, values: &[[f64; 2]]) -> Result<DensityMatrix> {
        let d = shape.dim();
        if values.len() != d * d {
            return Err(StateFileError::Invalid(format!(
                "expected {} matrix entries, found {}",
                d * d,
                values.len()
            )));
        }
        let m = ComplexMatrix::from_row_major(d, d, complex(values)).map_err(StateError::from)?;
        Ok(if self.normalize {
            DensityMatrix::new_unnormalized(shape, m)?
        } else {
            DensityMatrix::new(shape, m)?
        })
    }
}

/// Reads and validates a state file in one step.
pub fn load_state(path: &Path) -> Result<LoadedState> {
    StateFile::load(path)?.to_state()
}
