use super::{check_weights, MixError, Result, SUM_TOL};
use crate::numeric::hermitian_eig;
use crate::states::{partial_trace, DensityMatrix, Side};

fn sorted_desc(v: &[f64], len: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(len, 0.0);
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// `r ≺ s`: partial sums of the nonincreasing rearrangement of r never exceed
/// those of s, and the totals agree. The shorter vector is padded with zeros.
pub fn majorizes(r: &[f64], s: &[f64]) -> bool {
    let len = r.len().max(s.len());
    let r = sorted_desc(r, len);
    let s = sorted_desc(s, len);
    let (mut pr, mut ps) = (0.0, 0.0);
    for (a, b) in r.iter().zip(&s) {
        pr += a;
        ps += b;
        if pr > ps + SUM_TOL {
            return false;
        }
    }
    (pr - ps).abs() <= SUM_TOL
}

/// Whether ρ can be written as `Σ p_i |ψ_i><ψ_i|` with these probabilities.
pub fn check_pure_mix_eigen(rho: &DensityMatrix, probs: &[f64]) -> Result<bool> {
    check_weights(probs)?;
    Ok(majorizes(probs, &rho.spectrum()))
}

fn weighted_spectra(parts: &[(f64, Vec<f64>)], len: usize) -> Vec<f64> {
    let mut acc = vec![0.0; len];
    for (w, spec) in parts {
        for (a, x) in acc.iter_mut().zip(sorted_desc(spec, len)) {
            *a += w * x;
        }
    }
    acc
}

fn check_components(rho: &DensityMatrix, components: &[(f64, DensityMatrix)]) -> Result<()> {
    if components.is_empty() {
        return Err(MixError::NoComponents);
    }
    let weights: Vec<f64> = components.iter().map(|(w, _)| *w).collect();
    check_weights(&weights)?;
    for (_, c) in components {
        if c.shape() != rho.shape() {
            return Err(MixError::ShapeMismatch(rho.shape().to_string(), c.shape().to_string()));
        }
    }
    Ok(())
}

/// `λ(ρ) ≺ Σ_j p_j λ↓(ρ_j)`, necessary for `ρ = Σ_j p_j ρ_j`.
pub fn check_mixed_mix_eigen(rho: &DensityMatrix, components: &[(f64, DensityMatrix)]) -> Result<bool> {
    check_components(rho, components)?;
    let d = rho.shape().dim();
    let parts: Vec<(f64, Vec<f64>)> = components.iter().map(|(w, c)| (*w, c.spectrum())).collect();
    Ok(majorizes(&rho.spectrum(), &weighted_spectra(&parts, d)))
}

fn reduced_spectrum(rho: &DensityMatrix, side: Side) -> Vec<f64> {
    hermitian_eig(&partial_trace(rho, side))
        .expect("partial traces are Hermitian")
        .eigenvalues
}

/// The spectral condition applied to both reduced states.
pub fn check_reduced_constraints(rho: &DensityMatrix, components: &[(f64, DensityMatrix)]) -> Result<bool> {
    check_components(rho, components)?;
    for side in [Side::A, Side::B] {
        let target = reduced_spectrum(rho, side);
        let parts: Vec<(f64, Vec<f64>)> = components
            .iter()
            .map(|(w, c)| (*w, reduced_spectrum(c, side)))
            .collect();
        if !majorizes(&target, &weighted_spectra(&parts, target.len())) {
            return Ok(false);
        }
    }
    Ok(true)
}
