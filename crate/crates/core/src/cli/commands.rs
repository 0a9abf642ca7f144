use serde_json::{json, Value};

use super::report::{Inputs, ReportDocument};
use super::{BoundsArgs, CheckMixArgs, Cli, Command, GenericityArgs, InputError, KChoice, LocusArgs, MajorizeArgs};
use crate::loci::{
    local_dimension, locus_zero, pencil_from_state, sample_locus, ProjectivePoint, SearchConfig,
};
use crate::mixing::{
    check_component_all, check_component_necessary, check_mixed_mix_eigen, check_pure_mix_eigen,
    check_reduced_constraints, monte_carlo_genericity, schmidt_bounds, GenericityQuery, MixVerdict, TrialVerdict,
};
use crate::numeric::{Complex64, ToleranceConfig};
use crate::states::{DensityMatrix, Side};

type Outcome = (String, Value, Vec<String>);

pub(super) fn execute(cli: &Cli, tol: &ToleranceConfig) -> Result<ReportDocument, InputError> {
    let mut inputs = Inputs::default();
    let (command, (verdict, data, lines)) = match &cli.command {
        Command::Locus(a) => ("locus", locus(a, cli.seed, tol, &mut inputs)?),
        Command::CheckMix(a) => ("check-mix", check_mix(a, cli.seed, tol, &mut inputs)?),
        Command::Bounds(a) => ("bounds", bounds(a, tol, &mut inputs)?),
        Command::Majorize(a) => ("majorize", majorize(a, &mut inputs)?),
        Command::Genericity(a) => ("genericity", genericity(a, cli.seed, tol, &mut inputs)?),
    };
    Ok(ReportDocument {
        command: command.to_string(),
        inputs,
        verdict,
        data,
        seed: cli.seed,
        tolerances: *tol,
        lines,
    })
}

fn coords_json(coords: &[Complex64]) -> Value {
    Value::Array(coords.iter().map(|z| json!([z.re, z.im])).collect())
}

fn point_json(p: &ProjectivePoint) -> Value {
    coords_json(p.coords())
}

fn fmt_complex(z: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.6}")
    } else if re == 0.0 {
        format!("{im:.6}i")
    } else {
        format!("{re:.6}{im:+.6}i")
    }
}

fn fmt_point(p: &ProjectivePoint) -> String {
    let parts: Vec<String> = p.coords().iter().map(|&z| fmt_complex(z)).collect();
    format!("({})", parts.join(" : "))
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::A => "A",
        Side::B => "B",
    }
}

fn locus(a: &LocusArgs, seed: u64, tol: &ToleranceConfig, inputs: &mut Inputs) -> Result<Outcome, InputError> {
    let side: Side = a.side.into();
    inputs.flag("side", side_name(side));
    inputs.flag("k", a.k);
    inputs.flag("starts", a.starts);
    let rho = inputs.state("state", &a.state)?.density;
    let p = pencil_from_state(&rho, side, tol);
    if a.k >= p.rows() {
        return Err(InputError(format!("k = {} must be below {}", a.k, p.rows())));
    }

    if a.k == 0 {
        let lin = locus_zero(&p, tol);
        let points = lin.points();
        let verdict = if lin.is_empty() { "EMPTY" } else { "NONEMPTY" };
        let mut lines = vec![format!("exact V^0 on side {}, projective dimension {}", side, lin.projective_dimension)];
        lines.extend(points.iter().map(|pt| format!("  basis point {}", fmt_point(pt))));
        let data = json!({
            "k": 0,
            "side": side_name(side),
            "exact": true,
            "projective_dimension": lin.projective_dimension,
            "points": points.iter().map(point_json).collect::<Vec<_>>(),
        });
        return Ok((verdict.into(), data, lines));
    }

    let config = SearchConfig {
        starts: a.starts,
        seed,
        ..SearchConfig::default()
    };
    let sample = sample_locus(&p, a.k, &config, tol);
    if sample.trivial {
        let lines = vec![format!("every point has rank at most {} (pencil rank bound {})", a.k, p.max_rank())];
        let data = json!({"k": a.k, "side": side_name(side), "exact": false, "trivial": true, "points": []});
        return Ok(("WHOLE_SPACE".into(), data, lines));
    }
    let mut lines = vec![format!(
        "sampled V^{} on side {}: {} point(s) from {} starts, {} converged",
        a.k,
        side,
        sample.points.len(),
        sample.stats.starts,
        sample.stats.converged
    )];
    let mut points = Vec::new();
    for lp in &sample.points {
        let dim = local_dimension(&p, a.k, &lp.point, tol).ok();
        lines.push(format!(
            "  {}  sigma {:.3e} (threshold {:.3e}), local dimension {}",
            fmt_point(&lp.point),
            lp.residual,
            lp.threshold,
            dim.map_or("?".to_string(), |d| d.to_string())
        ));
        points.push(json!({
            "point": point_json(&lp.point),
            "residual": lp.residual,
            "threshold": lp.threshold,
            "local_dimension": dim,
        }));
    }
    let verdict = if sample.points.is_empty() { "NONE_FOUND" } else { "POINTS_FOUND" };
    let data = json!({
        "k": a.k,
        "side": side_name(side),
        "exact": false,
        "trivial": false,
        "points": points,
        "appears_isolated": sample.appears_isolated,
        "stats": {
            "starts": sample.stats.starts,
            "converged": sample.stats.converged,
            "best_residual": sample.stats.best_residual,
            "best_threshold": sample.stats.best_threshold,
        },
    });
    Ok((verdict.into(), data, lines))
}

fn check_mix(a: &CheckMixArgs, seed: u64, tol: &ToleranceConfig, inputs: &mut Inputs) -> Result<Outcome, InputError> {
    let side: Side = a.side.into();
    inputs.flag("side", side_name(side));
    inputs.flag("k", a.k.to_string());
    inputs.flag("starts", a.starts);
    let target = inputs.state("target", &a.target)?.density;
    let component = inputs.state("component", &a.component)?.density;
    let config = SearchConfig {
        starts: a.starts,
        seed,
        ..SearchConfig::default()
    };
    let verdict = match a.k {
        KChoice::All => check_component_all(&target, &component, side, &config, tol)?,
        KChoice::Level(k) => check_component_necessary(&target, &component, side, k, &config, tol)?,
    };
    match verdict {
        MixVerdict::Infeasible(cert) => {
            let verified = cert.verify(&target, &component, tol);
            let lines = vec![
                format!("witness {} in V^{} of the target (side {})", fmt_point(&cert.witness), cert.k, cert.side),
                format!(
                    "rank {} in target (sigma {:.3e}, threshold {:.3e})",
                    cert.rank_in_target, cert.target_residual.sigma, cert.target_residual.threshold
                ),
                format!(
                    "rank {} in component (sigma {:.3e}, threshold {:.3e})",
                    cert.rank_in_component, cert.component_residual.sigma, cert.component_residual.threshold
                ),
                "the component cannot appear in any mixture equal to the target".to_string(),
            ];
            let data = json!({
                "certificate": {
                    "witness": point_json(&cert.witness),
                    "side": side_name(cert.side),
                    "k": cert.k,
                    "rank_in_target": cert.rank_in_target,
                    "rank_in_component": cert.rank_in_component,
                    "target_residual": cert.target_residual.sigma,
                    "target_threshold": cert.target_residual.threshold,
                    "component_residual": cert.component_residual.sigma,
                    "component_threshold": cert.component_residual.threshold,
                    "reverified": verified,
                }
            });
            Ok(("INFEASIBLE".into(), data, lines))
        }
        MixVerdict::NoObstructionFound(stats) => {
            let mut lines = vec!["no obstruction found (this does not show that a mixture exists)".to_string()];
            let mut levels = Vec::new();
            for l in &stats.levels {
                lines.push(format!(
                    "  k={} {}: {} target point(s) tested",
                    l.k,
                    if l.exact { "exact" } else if l.target_trivial { "whole space" } else { "sampled" },
                    l.target_points
                ));
                levels.push(json!({
                    "k": l.k,
                    "exact": l.exact,
                    "target_trivial": l.target_trivial,
                    "target_points": l.target_points,
                    "best_component_ratio": l.best_component_ratio,
                }));
            }
            Ok(("NO_OBSTRUCTION_FOUND".into(), json!({ "levels": levels }), lines))
        }
    }
}

fn bounds(a: &BoundsArgs, tol: &ToleranceConfig, inputs: &mut Inputs) -> Result<Outcome, InputError> {
    let rho = inputs.state("state", &a.state)?.density;
    let b = schmidt_bounds(&rho, tol);
    let verdict = if b.forces_separable {
        "SEPARABLE_ONLY"
    } else if b.excludes_max_schmidt_rank {
        "MAX_SCHMIDT_RANK_EXCLUDED"
    } else {
        "UNCONSTRAINED"
    };
    let lines = vec![
        format!("dim V_A^0 = {}, cap from side A = {}", b.dim_a, b.cap_a),
        format!("dim V_B^0 = {}, cap from side B = {}", b.dim_b, b.cap_b),
        format!("Schmidt rank of every ensemble member is at most {}", b.cap),
        format!("forces separable: {}", b.forces_separable),
        format!("excludes max Schmidt rank: {}", b.excludes_max_schmidt_rank),
    ];
    let data = serde_json::to_value(b).expect("bounds serialize");
    Ok((verdict.into(), data, lines))
}

fn majorize(a: &MajorizeArgs, inputs: &mut Inputs) -> Result<Outcome, InputError> {
    let target = inputs.state("target", &a.target)?.density;
    if let Some(p) = &a.p {
        inputs.flag("p", p.clone());
        let ok = check_pure_mix_eigen(&target, p)?;
        let spectrum = target.spectrum();
        let lines = vec![
            format!("probabilities {:?}", p),
            format!("spectrum {:?}", rounded(&spectrum)),
            format!("probabilities majorized by spectrum: {ok}"),
        ];
        let data = json!({"mode": "pure", "probabilities": p, "spectrum": spectrum, "spectral_condition": ok});
        return Ok((pass(ok), data, lines));
    }

    let paths = a.components.clone().unwrap_or_default();
    let weights = a.weights.clone().unwrap_or_default();
    inputs.flag("weights", weights.clone());
    inputs.flag("reduced", a.reduced);
    if paths.len() != weights.len() {
        return Err(InputError(format!(
            "{} component file(s) but {} weight(s)",
            paths.len(),
            weights.len()
        )));
    }
    let mut components: Vec<(f64, DensityMatrix)> = Vec::with_capacity(paths.len());
    for (i, (path, &w)) in paths.iter().zip(&weights).enumerate() {
        components.push((w, inputs.state(&format!("component{}", i + 1), path)?.density));
    }
    let spectral = check_mixed_mix_eigen(&target, &components)?;
    let reduced = if a.reduced {
        Some(check_reduced_constraints(&target, &components)?)
    } else {
        None
    };
    let ok = spectral && reduced.unwrap_or(true);
    let mut lines = vec![format!("spectrum of target majorized by weighted component spectra: {spectral}")];
    if let Some(r) = reduced {
        lines.push(format!("same for both reduced states: {r}"));
    }
    let data = json!({"mode": "mixed", "weights": weights, "spectral_condition": spectral, "reduced_condition": reduced});
    Ok((pass(ok), data, lines))
}

fn pass(ok: bool) -> String {
    if ok { "PASS" } else { "FAIL" }.to_string()
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e9).round() / 1e9).collect()
}

fn genericity(a: &GenericityArgs, seed: u64, tol: &ToleranceConfig, inputs: &mut Inputs) -> Result<Outcome, InputError> {
    for (name, v) in [("m", a.m), ("n", a.n), ("r", a.r), ("t", a.t), ("trials", a.trials), ("starts", a.starts)] {
        inputs.flag(name, v);
    }
    let q = GenericityQuery {
        m: a.m,
        n: a.n,
        r: a.r,
        t: a.t,
        trials: a.trials,
        seed,
    };
    let config = SearchConfig {
        starts: a.starts,
        seed,
        ..SearchConfig::default()
    };
    let report = monte_carlo_genericity(&q, &config, tol)?;
    let verdict = match report.nonempty_fraction {
        None => "EMPTY_REPORT",
        Some(f) if f == 0.0 => "ALL_EMPTY",
        Some(f) if f == 1.0 => "ALL_NONEMPTY",
        Some(_) => "MIXED",
    };
    let mut lines = vec![
        format!("predicate (n-t)(r-t) >= m: {}", report.predicate_holds),
        format!("codimension {}", report.codimension),
    ];
    match report.nonempty_fraction {
        Some(f) => lines.push(format!(
            "nonempty fraction {f} ({} of {} trials, {} witnesses re-verified)",
            report.nonempty_count, report.trials, report.witnesses_verified
        )),
        None => lines.push("no trials run; fraction undefined".to_string()),
    }
    if let Some(r) = report.residuals {
        lines.push(format!(
            "residual/threshold: min {:.3e}, median {:.3e}, max {:.3e}",
            r.min_ratio, r.median_ratio, r.max_ratio
        ));
    }
    let trials: Vec<Value> = report
        .outcomes
        .iter()
        .map(|o| {
            json!({
                "index": o.index,
                "verdict": match o.verdict {
                    TrialVerdict::EmptyExact => "EMPTY_EXACT",
                    TrialVerdict::Nonempty => "NONEMPTY_WITNESS",
                    TrialVerdict::EmptyHeuristic => "EMPTY_HEURISTIC",
                },
                "witness": o.witness.as_ref().map(point_json),
                "witness_verified": o.witness_verified,
                "min_residual": o.min_residual,
                "threshold": o.threshold,
            })
        })
        .collect();
    let data = json!({
        "predicate_holds": report.predicate_holds,
        "codimension": report.codimension,
        "trials": report.trials,
        "nonempty_count": report.nonempty_count,
        "nonempty_fraction": report.nonempty_fraction,
        "witnesses_verified": report.witnesses_verified,
        "residual_summary": report.residuals,
        "outcomes": trials,
    });
    Ok((verdict.into(), data, lines))
}
