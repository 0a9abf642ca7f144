//! Rank-degeneracy loci of bipartite mixed states and the mixing
//! obstructions they imply.
//!
//! A state ρ on `H_A^m ⊗ H_B^n` with ensemble vectors `v_l` gives a linear
//! matrix family `r ↦ Σ r_i A_i` (the pencil). The locus `V_A^k(ρ)` is the set
//! of projective points where that family drops to rank ≤ k. If ρ is a
//! mixture containing ρ', every locus of ρ sits inside the matching locus of
//! ρ', so a point of `V^k(ρ)` outside `V^k(ρ')` rules ρ' out.
//!
//! Modules, bottom-up:
//! - [`numeric`]: complex matrices, Jacobi eigensolver and SVD, rank policy.
//! - [`states`]: pure states, ensembles, density matrices, partial traces.
//! - [`loci`]: pencils, projective points, exact `V^0`, sampled `V^k`.
//! - [`mixing`]: majorization, certificates, Schmidt-rank caps, genericity.
//! - [`statefile`] and [`cli`]: JSON state files and the command-line front end.

pub mod cli;
pub mod loci;
pub mod mixing;
pub mod numeric;
pub mod statefile;
pub mod states;
pub(crate) mod seeds;

pub use numeric::{ComplexMatrix, ToleranceConfig};
