//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use mixloci::loci::{
    hermitian_form, in_locus, locus_zero, pencil_from_ensemble, pencil_from_state, rank_at, residual_at, sample_locus,
    ProjectivePoint, SearchConfig,
};
use mixloci::mixing::{
    check_component_all, check_component_necessary, check_mixed_mix_eigen, check_pure_mix_eigen,
    check_reduced_constraints, excludes_max_schmidt_rank, forces_separable, majorizes, monte_carlo_genericity,
    schmidt_rank_cap, GenericityQuery, MixVerdict, TrialVerdict,
};
use mixloci::numeric::{determinant, inner, numerical_rank, Complex64, ComplexMatrix, ToleranceConfig};
use mixloci::states::{
    density_from_ensemble, eigen_ensemble, mix, random_density, random_pure, random_unitary, BipartiteShape,
    DensityMatrix, Ensemble, PureState, Side,
};
use rand::Rng;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn single_point_locus(rho: &DensityMatrix, expected: &[f64]) -> Check {
    let t = tol();
    let lin = locus_zero(&pencil_from_state(rho, Side::A, &t), &t);
    ensure!(lin.projective_dimension == 0, "projective dimension {}", lin.projective_dimension);
    let want = ProjectivePoint::from_real(expected).unwrap();
    let got = &lin.points()[0];
    ensure!(got.distance(&want) <= 1e-9, "point {:?} is {:e} from {:?}", got.coords(), got.distance(&want), expected);
    Ok(())
}

fn criterion_1() -> Check {
    let rho = fixture("example1.json").density;
    single_point_locus(&rho, &[1.0, -1.0])?;
    let cap = schmidt_rank_cap(&rho, &tol());
    ensure!(cap == 1, "schmidt_rank_cap = {cap}");
    ensure!(forces_separable(&rho, &tol()), "forces_separable is false");
    Ok(())
}

fn criterion_2() -> Check {
    let t = tol();
    let component = fixture("example2_component.json").density;
    for name in ["example2_target.json", "example2_target_alt.json"] {
        let target = fixture(name).density;
        let v = check_component_necessary(&target, &component, Side::A, 2, &SearchConfig::default(), &t)
            .map_err(|e| e.to_string())?;
        let MixVerdict::Infeasible(cert) = v else {
            return Err(format!("{name}: no certificate ({v:?})"));
        };
        let w = cert.witness.coords();
        ensure!(w[0].norm() <= 1e-8, "{name}: witness has |r1| = {:e}", w[0].norm());
        ensure!(cert.rank_in_component == 3, "{name}: component rank {}", cert.rank_in_component);
        ensure!(
            cert.component_residual.sigma >= 10.0 * cert.component_residual.threshold,
            "{name}: component residual {:e} vs threshold {:e}",
            cert.component_residual.sigma,
            cert.component_residual.threshold
        );
        ensure!(cert.verify(&target, &component, &t), "{name}: certificate does not re-verify");
        // the reference component matrix is nonsingular at the witness
        let det = determinant(&reference_example2_component(w)).norm();
        ensure!(det > 1e-3, "{name}: reference component determinant {det:e} at witness");
    }
    Ok(())
}

fn criterion_3() -> Check {
    let rho = fixture("example3.json").density;
    single_point_locus(&rho, &[0.0, 1.0, -1.0])?;
    ensure!(excludes_max_schmidt_rank(&rho, &tol()), "excludes_max_schmidt_rank is false");
    let cap = schmidt_rank_cap(&rho, &tol());
    ensure!(cap == 2, "schmidt_rank_cap = {cap}");
    Ok(())
}

fn criterion_4() -> Check {
    let t = tol();
    let loaded = fixture("example4.json");
    let pencils = [
        pencil_from_ensemble(loaded.ensemble.as_ref().unwrap(), Side::A),
        pencil_from_state(&loaded.density, Side::A, &t),
    ];
    let mut rng = rng(4);
    for p in &pencils {
        for _ in 0..100 {
            let g = gaussian(&mut rng, 2);
            let pt = ProjectivePoint::new(&[cx(0.0, 0.0), cx(0.0, 0.0), g[0], g[1]]).unwrap();
            let res = residual_at(p, 2, &pt, &t).unwrap();
            ensure!(res.sigma <= res.threshold, "sigma3 {:e} above threshold {:e}", res.sigma, res.threshold);
            ensure!(in_locus(p, 2, &pt, &t).unwrap(), "line point not in locus");
        }
        let sample = sample_locus(p, 2, &SearchConfig::default(), &t);
        let on_line = sample
            .points
            .iter()
            .filter(|lp| lp.point.coords()[0].norm() <= 1e-6 && lp.point.coords()[1].norm() <= 1e-6)
            .count();
        ensure!(on_line >= 1, "sampler found {} points, none on the line", sample.points.len());
    }
    Ok(())
}

/// Matches each pencil column to a reference column up to a positive scale,
/// entrywise at every point. Returns the matched reference column indices.
fn match_columns(
    evals: &[ComplexMatrix],
    reference: &[ComplexMatrix],
) -> Result<Vec<usize>, String> {
    let cols = evals[0].cols();
    ensure!(reference[0].cols() == cols, "column count {} vs reference {}", cols, reference[0].cols());
    ensure!(reference[0].rows() == evals[0].rows(), "row count mismatch");
    let mut matched = Vec::with_capacity(cols);
    for l in 0..cols {
        let found = (0..cols).find(|&q| {
            let (e0, p0) = (evals[0].column(l), reference[0].column(q));
            let pp: f64 = p0.iter().map(|z| z.norm_sqr()).sum();
            if pp == 0.0 {
                return false;
            }
            let scale = inner(&p0, &e0) / pp;
            if scale.re <= 0.0 || scale.im.abs() > 1e-12 {
                return false;
            }
            evals.iter().zip(reference).all(|(e, p)| {
                (0..e.rows()).all(|i| (e[(i, l)] - p[(i, q)] * scale.re).norm() <= 1e-10)
            })
        });
        match found {
            Some(q) => matched.push(q),
            None => return Err(format!("pencil column {} matches no reference column", l + 1)),
        }
    }
    Ok(matched)
}

fn criterion_5() -> Check {
    type Reference = fn(&[Complex64]) -> ComplexMatrix;
    let cases: [(&str, Reference, usize, bool); 4] = [
        ("example2_target.json", reference_example2, 3, true),
        ("example3.json", reference_example3, 3, true),
        ("example4.json", reference_example4, 4, true),
        // the component's reference matrix lists its last two columns swapped
        ("example2_component.json", reference_example2_component, 3, false),
    ];
    let mut rng = rng(5);
    for (name, reference, m, in_order) in cases {
        let p = pencil_from_ensemble(&fixture_ensemble(name), Side::A);
        let points: Vec<Vec<Complex64>> = (0..20).map(|_| gaussian(&mut rng, m)).collect();
        let evals: Vec<ComplexMatrix> = points.iter().map(|r| p.evaluate(r)).collect();
        let want: Vec<ComplexMatrix> = points.iter().map(|r| reference(r)).collect();
        let matched = match_columns(&evals, &want).map_err(|e| format!("{name}: {e}"))?;
        let mut sorted = matched.clone();
        sorted.sort_unstable();
        sorted.dedup();
        ensure!(sorted.len() == matched.len(), "{name}: columns matched twice {matched:?}");
        if in_order {
            ensure!(matched.iter().enumerate().all(|(i, &q)| i == q), "{name}: column order {matched:?}");
        }
    }
    Ok(())
}

fn random_mixture(shape: BipartiteShape, rng: &mut rand_chacha::ChaCha8Rng) -> (DensityMatrix, Vec<(f64, DensityMatrix)>) {
    let count = rng.random_range(2..=3);
    let comps: Vec<DensityMatrix> = (0..count)
        .map(|_| random_density(shape, rng.random_range(1..=shape.dim()), rng.random()).unwrap())
        .collect();
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let rho = mix(&w, &comps).unwrap();
    (rho, w.into_iter().zip(comps).collect())
}

/// Ensemble of ρ assembled from the components' spectral ensembles.
fn mixture_ensemble(parts: &[(f64, DensityMatrix)], shape: BipartiteShape, t: &ToleranceConfig) -> Ensemble {
    let members = parts
        .iter()
        .flat_map(|(w, c)| {
            eigen_ensemble(c, t)
                .members()
                .iter()
                .map(|(p, v)| (w * p, v.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    Ensemble::new(shape, members).unwrap()
}

fn criterion_6() -> Check {
    let t = tol();
    let cfg = SearchConfig::default();
    let mut rng = rng(6);
    for (m, n) in [(2, 2), (3, 3)] {
        let shape = BipartiteShape::new(m, n);
        for trial in 0..100 {
            let (rho, parts) = random_mixture(shape, &mut rng);
            for (ci, (_, c)) in parts.iter().enumerate() {
                for side in [Side::A, Side::B] {
                    let v = check_component_all(&rho, c, side, &cfg, &t).map_err(|e| e.to_string())?;
                    ensure!(
                        !v.is_infeasible(),
                        "{m}x{n} trial {trial}: true component {ci} excluded on side {side}: {v:?}"
                    );
                }
            }
            let other = mixture_ensemble(&parts, shape, &t);
            ensure!(density_from_ensemble(&other).distance(&rho) < 1e-10, "mixture ensemble mismatch");
            for side in [Side::A, Side::B] {
                let spectral = pencil_from_ensemble(&eigen_ensemble(&rho, &t), side);
                let alt = pencil_from_ensemble(&other, side);
                for _ in 0..200 {
                    let pt = ProjectivePoint::new(&gaussian(&mut rng, shape.side_dim(side))).unwrap();
                    let form = numerical_rank(&hermitian_form(&rho, &pt, side).unwrap(), &t);
                    let pencil = rank_at(&spectral, &pt, &t).unwrap();
                    let other_rank = rank_at(&alt, &pt, &t).unwrap();
                    ensure!(
                        form == pencil && pencil == other_rank,
                        "{m}x{n} trial {trial} side {side}: form rank {form}, pencil rank {pencil}, other ensemble {other_rank}"
                    );
                }
            }
        }
    }
    Ok(())
}

/// Sum of the k largest entries over all k-subsets, compared for every k.
fn subset_oracle(r: &[f64], s: &[f64]) -> bool {
    let len = r.len().max(s.len());
    let pad = |v: &[f64]| {
        let mut v = v.to_vec();
        v.resize(len, 0.0);
        v
    };
    let (r, s) = (pad(r), pad(s));
    let best = |v: &[f64], k: usize| {
        (0u32..1 << len)
            .filter(|mask| mask.count_ones() as usize == k)
            .map(|mask| (0..len).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    (1..len).all(|k| best(&r, k) <= best(&s, k) + 1e-9) && (r.iter().sum::<f64>() - s.iter().sum::<f64>()).abs() <= 1e-9
}

fn criterion_7() -> Check {
    let mut rng = rng(7);
    let mut agree_true = 0;
    for i in 0..1000 {
        let (lr, ls) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let draw = |rng: &mut rand_chacha::ChaCha8Rng, len: usize| -> Vec<f64> {
            if i % 2 == 0 {
                // coarse grid: ties and exactly equal totals are common
                let v: Vec<f64> = (0..len).map(|_| rng.random_range(0..4) as f64).collect();
                let total: f64 = v.iter().sum::<f64>().max(1.0);
                v.iter().map(|x| x / total).collect()
            } else {
                let v: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
                let total: f64 = v.iter().sum();
                v.iter().map(|x| x / total).collect()
            }
        };
        let r = draw(&mut rng, lr);
        let s = draw(&mut rng, ls);
        let (got, want) = (majorizes(&r, &s), subset_oracle(&r, &s));
        ensure!(got == want, "pair {i}: majorizes({r:?}, {s:?}) = {got}, oracle {want}");
        agree_true += got as usize;
    }
    ensure!(agree_true > 50, "only {agree_true} majorizing pairs drawn");

    for trial in 0..100u64 {
        let (m, n) = [(2, 2), (2, 3), (3, 3)][trial as usize % 3];
        let shape = BipartiteShape::new(m, n);
        let count = rng.random_range(1..=5);
        let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let members: Vec<(f64, PureState)> = probs
            .iter()
            .map(|&p| (p, random_pure(shape, rng.random())))
            .collect();
        let rho = density_from_ensemble(&Ensemble::new(shape, members).unwrap());
        ensure!(check_pure_mix_eigen(&rho, &probs).unwrap(), "pure mixture {trial} fails");

        let (rho, parts) = random_mixture(shape, &mut rng);
        ensure!(check_mixed_mix_eigen(&rho, &parts).unwrap(), "mixture {trial} fails the spectral check");
        ensure!(check_reduced_constraints(&rho, &parts).unwrap(), "mixture {trial} fails the reduced check");
    }

    let s22 = BipartiteShape::new(2, 2);
    let diag = |v: [f64; 4]| DensityMatrix::new(s22, ComplexMatrix::diag_real(&v)).unwrap();
    ensure!(!check_pure_mix_eigen(&diag([0.6, 0.4, 0.0, 0.0]), &[0.8, 0.2]).unwrap(), "(0.8, 0.2) accepted for (0.6, 0.4)");
    ensure!(check_pure_mix_eigen(&diag([0.7, 0.3, 0.0, 0.0]), &[0.5, 0.5]).unwrap(), "(0.5, 0.5) rejected for (0.7, 0.3)");
    let pure = random_pure(s22, 1).projector();
    ensure!(
        !check_mixed_mix_eigen(&pure, &[(1.0, DensityMatrix::maximally_mixed(s22))]).unwrap(),
        "pure state accepted as a mixture of the maximally mixed state"
    );
    let product = fixture("product.json").density;
    let bell = fixture("bell.json").density;
    ensure!(!check_reduced_constraints(&product, &[(1.0, bell)]).unwrap(), "product accepted from a Bell component");
    Ok(())
}

fn criterion_8() -> Check {
    let t = tol();
    let cfg = SearchConfig::default();
    let q = GenericityQuery { m: 4, n: 4, r: 4, t: 2, trials: 200, seed: 0 };
    let report = monte_carlo_genericity(&q, &cfg, &t).map_err(|e| e.to_string())?;
    ensure!(report.predicate_holds, "predicate false for 4,4,4,2");
    ensure!(report.nonempty_fraction == Some(0.0), "4x4: nonempty fraction {:?}", report.nonempty_fraction);
    let worst = report
        .outcomes
        .iter()
        .map(|o| o.min_residual / o.threshold)
        .fold(f64::INFINITY, f64::min);
    ensure!(worst > 10.0, "4x4: smallest residual/threshold ratio {worst:e}");

    let q = GenericityQuery { m: 3, n: 3, r: 3, t: 2, trials: 200, seed: 0 };
    let report = monte_carlo_genericity(&q, &cfg, &t).map_err(|e| e.to_string())?;
    ensure!(!report.predicate_holds, "predicate true for 3,3,3,2");
    ensure!(report.nonempty_fraction == Some(1.0), "3x3: nonempty fraction {:?}", report.nonempty_fraction);
    ensure!(report.witnesses_verified == 200, "3x3: {} witnesses re-verified", report.witnesses_verified);
    ensure!(report.outcomes.iter().all(|o| o.verdict == TrialVerdict::Nonempty), "3x3: non-witness verdict");
    Ok(())
}

fn conj(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().map(|z| z.conj()).collect()
}

fn criterion_9() -> Check {
    let t = tol();
    let shape = BipartiteShape::new(3, 3);
    let mut rng = rng(9);
    let form_rank = |rho: &DensityMatrix, ket: &[Complex64]| -> usize {
        // the form Σ r_i r_j* ρ_ij is <φ|ρ|φ> for the ket φ = Σ r_i* |i>
        let pt = ProjectivePoint::new(&conj(ket)).unwrap();
        numerical_rank(&hermitian_form(rho, &pt, Side::A).unwrap(), &t)
    };
    let mut degenerate = 0;
    for triple in 0..50u64 {
        let rho = if triple % 2 == 0 {
            random_density(shape, rng.random_range(1..=9), rng.random()).unwrap()
        } else {
            restricted_state(3, 3, 2, rng.random_range(1..=6), rng.random())
        };
        let u = random_unitary(3, rng.random());
        let v = random_unitary(3, rng.random());
        let rho2 = rho.conjugate_local(&u, &v);
        let ud = u.adjoint();
        let mut kets: Vec<Vec<Complex64>> = (0..20).map(|_| gaussian(&mut rng, 3)).collect();
        // points of V_A^0(ρ) carried over to ρ'
        for r in locus_zero(&pencil_from_state(&rho, Side::A, &t), &t).basis {
            kets.push(u.matvec(&conj(&r)));
        }
        for phi in &kets {
            let (a, b) = (form_rank(&rho2, phi), form_rank(&rho, &ud.matvec(phi)));
            ensure!(a == b, "triple {triple}: rank {a} for the rotated state, {b} for the original");
            degenerate += (a == 0) as usize;
        }
    }
    ensure!(degenerate >= 25, "only {degenerate} locus points exercised");
    Ok(())
}

fn criterion_10() -> Check {
    let t = tol();
    let cfg = SearchConfig::default();
    let mut rng = rng(10);
    let mut nonempty = 0;
    for i in 0..100 {
        let (m, n) = [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3)][i % 6];
        let s = rng.random_range(1..=m);
        let rho = restricted_state(m, n, s, rng.random_range(1..=s * n), rng.random());
        for side in [Side::A, Side::B] {
            let p = pencil_from_state(&rho, side, &t);
            let lin = locus_zero(&p, &t);
            for pt in lin.points() {
                ensure!(in_locus(&p, 0, &pt, &t).unwrap(), "state {i} side {side}: basis point fails in_locus");
            }
            let sample = sample_locus(&p, 0, &cfg, &t);
            let sampled_dim = if sample.points.is_empty() {
                -1
            } else {
                let cols: Vec<Vec<Complex64>> = sample.points.iter().map(|lp| lp.point.coords().to_vec()).collect();
                numerical_rank(&ComplexMatrix::from_columns(&cols), &t) as isize - 1
            };
            ensure!(
                sampled_dim == lin.projective_dimension,
                "state {i} ({m}x{n}, s={s}) side {side}: exact dimension {}, sampled {}",
                lin.projective_dimension,
                sampled_dim
            );
            nonempty += !lin.is_empty() as usize;
        }
    }
    ensure!(nonempty >= 20, "only {nonempty} nonempty loci exercised");
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("Example 1: exact V_A^0 is (1:-1), cap 1, forces separable", criterion_1),
        ("Example 2: component ruled out with a witness on r1 = 0", criterion_2),
        ("Example 3: exact V_A^0 is (0:1:-1), cap 2, max rank excluded", criterion_3),
        ("Example 4: the line r1 = r2 = 0 lies in V_A^2 and is sampled", criterion_4),
        ("pencil fidelity against the reference matrices", criterion_5),
        ("true components never excluded; form and pencil ranks agree", criterion_6),
        ("majorization oracle and spectral mixing conditions", criterion_7),
        ("genericity: 4x4 r=4 t=2 always empty, 3x3 r=3 t=2 always nonempty", criterion_8),
        ("local-unitary covariance of form ranks", criterion_9),
        ("exact V^0 agrees with the sampler at k = 0", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
