#![allow(dead_code)]

use std::path::PathBuf;

use mixloci::numeric::{Complex64, ComplexMatrix};
use mixloci::statefile::{load_state, LoadedState};
use mixloci::states::{random_ensemble, random_unitary, BipartiteShape, DensityMatrix, Ensemble, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> LoadedState {
    load_state(&fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture_ensemble(name: &str) -> Ensemble {
    fixture(name).ensemble.expect("fixture has an ensemble")
}

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| cx(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn matrix(rows: Vec<Vec<Complex64>>) -> ComplexMatrix {
    let cols = rows[0].len();
    ComplexMatrix::from_row_major(rows.len(), cols, rows.into_iter().flatten().collect()).unwrap()
}

/// The reference 3×4 pencil of the first Example 2 state.
pub fn reference_example2(r: &[Complex64]) -> ComplexMatrix {
    let z = cx(0.0, 0.0);
    matrix(vec![
        vec![r[0], r[1], z, z],
        vec![z, r[2], r[0], z],
        vec![z, z, r[1], r[2]],
    ])
}

/// The reference 3×3 pencil of the Example 2 component.
pub fn reference_example2_component(r: &[Complex64]) -> ComplexMatrix {
    matrix(vec![
        vec![r[0], r[1], r[2]],
        vec![r[1], r[2], r[0]],
        vec![r[2], r[0], r[1]],
    ])
}

pub fn reference_example3(r: &[Complex64]) -> ComplexMatrix {
    let z = cx(0.0, 0.0);
    matrix(vec![
        vec![r[0], r[1] + r[2], z, z],
        vec![z, r[0] + r[1] + r[2], r[1] + r[2], z],
        vec![z, z, r[0], r[1] + r[2]],
    ])
}

pub fn reference_example4(r: &[Complex64]) -> ComplexMatrix {
    let z = cx(0.0, 0.0);
    matrix(vec![
        vec![r[0], r[1], r[3], r[2], z],
        vec![z, r[0], r[2], r[3], r[0]],
        vec![z, z, r[2], r[3], r[1]],
        vec![z, z, z, r[2], r[0]],
    ])
}

/// Random state whose A-support is a random s-dimensional subspace, so the
/// ket-level complement of that subspace lies in `V_A^0`.
pub fn restricted_state(m: usize, n: usize, s: usize, rank: usize, seed: u64) -> DensityMatrix {
    let small = BipartiteShape::new(s, n);
    let e = random_ensemble(small, rank.min(s * n), seed).unwrap();
    let shape = BipartiteShape::new(m, n);
    let members = e
        .members()
        .iter()
        .map(|(p, v)| {
            let mut amps = vec![cx(0.0, 0.0); m * n];
            amps[..s * n].copy_from_slice(v.amplitudes());
            (*p, PureState::new(&amps, shape).unwrap())
        })
        .collect();
    let rho = mixloci::states::density_from_ensemble(&Ensemble::new(shape, members).unwrap());
    let w = random_unitary(m, seed ^ 0xA5A5);
    rho.conjugate_local(&w, &ComplexMatrix::identity(n))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
