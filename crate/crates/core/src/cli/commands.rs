//! One function per subcommand. Each returns the exit code for a completed
//! run; errors propagate to the caller, which maps them to exit codes.

use std::path::PathBuf;

use serde_json::{json, Value};

use super::config::RunConfig;
use super::output::{csv_table, Artifacts};
use super::{Command, EXIT_OK, EXIT_VIOLATION};
use crate::bifurcation::{certify_local_bifurcation, emit_perturbed_domain, group_certificate, locate_bifurcation, SHAPE_TOL};
use crate::dtn::{lambda_grid_for, lambda_grid_from, sigma_curve};
use crate::error::{Error, Result};
use crate::harmonics::{check_g1, group_restricted_spectrum, invariant_projection_rank, GroupSpectrum};
use crate::qualitative::{qualitative_report, Verdict};
use crate::radial::{convergence_study, solve_exterior_ground_state, solve_unit_ground_state, UnitProfileCache};
use crate::spectral::{constrained_trial_search, lambda0_lower_bound_at, lambda0_self_consistent_bound, radial_spectrum};

/// Modes and intervals of the randomized constrained-form trials.
const TRIAL_MODES: usize = 3;
const TRIAL_INTERVALS: usize = 1 << 13;

pub(super) fn dispatch(command: &Command, cfg: &RunConfig) -> Result<i32> {
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut out = Artifacts::new(&dir, cfg.hash())?;
    if let Command::FindBifurcation { check_group_only: true, .. } = command {
        return check_group_only(cfg);
    }
    out.json("config.json", cfg)?;
    match command {
        Command::SolveRadial { .. } => solve_radial(cfg, &mut out, true),
        Command::Qualitative { .. } => solve_radial(cfg, &mut out, false),
        Command::Spectrum { .. } => spectrum(cfg, &mut out),
        Command::SigmaCurve { .. } => sigma_curves(cfg, &mut out),
        Command::FindBifurcation { .. } => find_bifurcation(cfg, &mut out),
        Command::CheckGroup { .. } => check_group(cfg, &mut out),
        Command::ConvergenceStudy { .. } => convergence(cfg, &mut out),
    }
}

fn print_summary(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("summary serializes"));
}

fn status(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn solve_radial(cfg: &RunConfig, out: &mut Artifacts, with_profile: bool) -> Result<i32> {
    let params = cfg.params;
    let shot = solve_exterior_ground_state(&params, cfg.radius, &cfg.numerics)?;
    let w = &shot.profile;
    if with_profile {
        let rows = w
            .nodes()
            .iter()
            .zip(&w.values)
            .zip(&w.derivatives)
            .map(|((&r, &v), &d)| vec![r, v, d]);
        out.csv("profile.csv", &csv_table(&["r", "value", "derivative"], rows))?;
        let (r_peak, peak) = w.peak();
        out.json(
            "profile.json",
            &json!({
                "params": params,
                "R": cfg.radius,
                "nodes": w.len(),
                "r_max": w.r_max(),
                "slope_at_R": shot.slope_star,
                "peak": peak,
                "r_peak": r_peak,
                "decay_exponent": w.decay_exponent,
                "matching_radius": shot.matching_radius,
                "matching_residual": shot.residual_sup,
                "shooting_steps": shot.bracket_history.len(),
            }),
        )?;
    }
    let verdicts = qualitative_report(&params, w, cfg.radius)?;
    let ok = verdicts.iter().all(Verdict::passed);
    out.json("qualitative.json", &json!({ "passed": ok, "verdicts": verdicts }))?;
    print_summary(&json!({
        "R": cfg.radius,
        "slope_at_R": shot.slope_star,
        "checks": verdicts.iter().map(|v| json!({ v.lemma.clone(): v.verdict })).collect::<Vec<_>>(),
    }));
    Ok(status(ok))
}

fn spectrum(cfg: &RunConfig, out: &mut Artifacts) -> Result<i32> {
    let params = cfg.params;
    let group = cfg.symmetry_group()?;
    let spec = group_restricted_spectrum(&group, cfg.k_max)?;
    let first = spec
        .first()
        .ok_or_else(|| Error::Precondition(format!("{group} has no invariant harmonics up to degree {}", cfg.k_max)))?;
    let u = solve_unit_ground_state(&params, cfg.lambda, &cfg.numerics)?.profile;
    let pairs = radial_spectrum(&u, &params, cfg.n_eigs, &cfg.numerics)?;
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.eigenvalue).collect();
    let negative = eigenvalues.iter().filter(|&&t| t < 0.0).count();
    let near_zero = eigenvalues.iter().any(|t| t.abs() < 1e-8);
    let tau0 = eigenvalues[0];
    let bound = lambda0_lower_bound_at(tau0, first.mu, cfg.lambda)?;
    let trials = constrained_trial_search(&u, &params, &spec, TRIAL_MODES, cfg.trials, TRIAL_INTERVALS, cfg.seed)?;

    let grid = pairs[0].eigenfunction.nodes().to_vec();
    let header: Vec<String> = std::iter::once("r".to_string())
        .chain((0..pairs.len()).map(|k| format!("z{k}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &r)| std::iter::once(r).chain(pairs.iter().map(|p| p.eigenfunction.values[i])).collect());
    out.csv("eigenfunctions.csv", &csv_table(&header, rows))?;

    let ok = negative == 1 && !near_zero;
    let report = json!({
        "params": params,
        "lambda": cfg.lambda,
        "eigenvalues": eigenvalues,
        "morse_index": negative,
        "nondegenerate": !near_zero,
        "group": group,
        "i1": first.i,
        "mu_i1": first.mu,
        "lambda0_lower_bound": bound,
        "trial_search": trials,
        "seed": cfg.seed,
    });
    out.json("spectrum.json", &report)?;
    print_summary(&json!({ "eigenvalues": report["eigenvalues"], "morse_index": negative, "lambda0_lower_bound": bound }));
    Ok(status(ok))
}

fn sigma_curves(cfg: &RunConfig, out: &mut Artifacts) -> Result<i32> {
    let group = cfg.symmetry_group()?;
    let spec = group_restricted_spectrum(&group, cfg.k_max)?;
    let first = *spec
        .first()
        .ok_or_else(|| Error::Precondition(format!("{group} has no invariant harmonics up to degree {}", cfg.k_max)))?;
    let cache = UnitProfileCache::new(cfg.params, cfg.numerics.clone());
    let bound = lambda0_self_consistent_bound(&cache, first.mu)?;
    if let Some(lo) = cfg.lambda_min {
        if lo <= bound {
            return Err(Error::Precondition(format!(
                "lambda_min = {lo} is not above the Lambda0 lower bound {bound}"
            )));
        }
    }
    let mut brackets = Vec::new();
    for entry in spec.entries.iter().take(cfg.degrees) {
        let grid = match cfg.lambda_min {
            Some(lo) => lambda_grid_from(entry.i, lo, cfg.lambda_max, cfg.grid_points, &cache)?,
            None => lambda_grid_for(entry.i, &cache, &spec, cfg.lambda_max, cfg.grid_points)?,
        };
        let curve = sigma_curve(entry.i, &grid, &cache)?;
        out.csv(&format!("sigma_degree_{}.csv", entry.i), &curve.to_csv())?;
        let b: Vec<Value> = curve
            .brackets()
            .into_iter()
            .map(|(l, r)| json!({ "lambda_left": l.0, "sigma_left": l.1, "lambda_right": r.0, "sigma_right": r.1 }))
            .collect();
        brackets.push(json!({ "degree": entry.i, "multiplicity": entry.m, "brackets": b }));
    }
    let doc = json!({ "group": group, "lambda0_lower_bound": bound, "curves": brackets });
    out.json("brackets.json", &doc)?;
    print_summary(&doc);
    Ok(EXIT_OK)
}

fn spectrum_summary(spec: &GroupSpectrum) -> Result<Value> {
    let g1 = check_g1(spec)?;
    Ok(json!({ "spectrum": spec, "g1": g1 }))
}

fn check_group_only(cfg: &RunConfig) -> Result<i32> {
    let group = cfg.symmetry_group()?;
    let spec = group_restricted_spectrum(&group, cfg.k_max)?;
    let summary = spectrum_summary(&spec)?;
    print_summary(&summary);
    Ok(EXIT_OK)
}

fn find_bifurcation(cfg: &RunConfig, out: &mut Artifacts) -> Result<i32> {
    let group = cfg.symmetry_group()?;
    let spec = group_restricted_spectrum(&group, cfg.k_max)?;
    let gate = group_certificate(&spec)?;
    if !gate.passed {
        out.json("certificate.json", &gate)?;
        print_summary(&json!({ "certified": false, "reason": "group condition fails", "g1": gate.g1 }));
        return Ok(EXIT_VIOLATION);
    }
    let degree = gate.g1.i1;
    let cache = UnitProfileCache::new(cfg.params, cfg.numerics.clone());
    let (curve, point) = match cfg.lambda_min {
        Some(lo) => {
            let bound = lambda0_self_consistent_bound(&cache, gate.g1.mu_i1)?;
            if lo <= bound {
                return Err(Error::Precondition(format!(
                    "lambda_min = {lo} is not above the Lambda0 lower bound {bound}"
                )));
            }
            let grid = lambda_grid_from(degree, lo, cfg.lambda_max, cfg.grid_points, &cache)?;
            let curve = sigma_curve(degree, &grid, &cache)?;
            let point = crate::bifurcation::find_lambda_star(&curve, &cache, &spec)?;
            (curve, point)
        }
        None => locate_bifurcation(degree, &cache, &spec, cfg.lambda_max, cfg.grid_points)?,
    };
    out.csv(&format!("sigma_degree_{degree}.csv"), &curve.to_csv())?;
    out.json("bifurcation.json", &point)?;
    let cert = certify_local_bifurcation(&point, &cache, &spec)?;
    out.json("certificate.json", &cert)?;

    let mut shapes_ok = true;
    let mut shapes = Vec::new();
    for (k, &eps) in cfg.epsilons.iter().enumerate() {
        let shape = emit_perturbed_domain(&point, eps, &group, cfg.shape_samples)?;
        let ok = shape.invariance_defect < SHAPE_TOL && shape.mean_defect < SHAPE_TOL;
        shapes_ok &= ok;
        let name = format!("shape_{k}.csv");
        out.csv(&name, &shape.to_csv())?;
        shapes.push(json!({
            "file": name,
            "epsilon": eps,
            "base_radius": shape.base_radius,
            "degree": shape.degree,
            "samples": shape.points.len(),
            "coefficients": shape.coefficients,
            "invariance_defect": shape.invariance_defect,
            "mean_defect": shape.mean_defect,
            "passed": ok,
        }));
    }
    out.json("shapes.json", &shapes)?;
    print_summary(&json!({
        "certified": cert.passed,
        "degree": degree,
        "lambda_star": point.lambda_star,
        "radius_star": point.radius_star,
        "shapes_passed": shapes_ok,
    }));
    Ok(status(cert.passed && shapes_ok))
}

fn check_group(cfg: &RunConfig, out: &mut Artifacts) -> Result<i32> {
    let group = cfg.symmetry_group()?;
    let spec = group_restricted_spectrum(&group, cfg.k_max)?;
    let table = group.table()?;
    let mut degrees = Vec::with_capacity(cfg.k_max);
    let mut consistent = true;
    for k in 1..=cfg.k_max {
        let character = table.character_multiplicity(k)?;
        let rank = invariant_projection_rank(&group, k)?;
        consistent &= character == rank;
        degrees.push(json!({ "degree": k, "character_multiplicity": character, "projection_rank": rank }));
    }
    let mut doc = spectrum_summary(&spec)?;
    doc["order"] = json!(table.order());
    doc["degrees"] = json!(degrees);
    doc["consistent"] = json!(consistent);
    out.json("group.json", &doc)?;
    print_summary(&json!({ "group": group.to_string(), "order": table.order(), "g1": doc["g1"], "consistent": consistent }));
    Ok(status(consistent))
}

fn convergence(cfg: &RunConfig, out: &mut Artifacts) -> Result<i32> {
    let points = convergence_study(&cfg.params, &cfg.radii, &cfg.numerics)?;
    let decreasing = points.windows(2).all(|w| w[1].h1_distance < w[0].h1_distance);
    out.csv(
        "convergence.csv",
        &csv_table(&["radius", "h1_distance"], points.iter().map(|p| vec![p.radius, p.h1_distance])),
    )?;
    let doc = json!({ "params": cfg.params, "points": points, "strictly_decreasing": decreasing });
    out.json("convergence.json", &doc)?;
    print_summary(&doc);
    Ok(status(decreasing))
}
