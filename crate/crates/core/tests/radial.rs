use std::sync::Arc;

use hyperbif::model::{decay_exponent_nonlinear, metric_factors};
use hyperbif::radial::fd::{FdProblem, InnerCondition};
use hyperbif::radial::*;
use hyperbif::{Error, ModelParams, NumericsConfig};

fn params(n: usize, p: f64) -> ModelParams {
    ModelParams::new(n, p).unwrap()
}

fn sup_distance(a: &hyperbif::RadialProfile, b: &hyperbif::RadialProfile) -> f64 {
    b.nodes()
        .iter()
        .zip(&b.values)
        .map(|(&r, &v)| (a.eval(r) - v).abs())
        .fold(0.0, f64::max)
}

#[test]
fn exterior_peak_and_boundary_value() {
    let cfg = NumericsConfig::default();
    let w = solve_exterior_ground_state(&params(3, 3.0), 1.0, &cfg).unwrap();
    assert_eq!(w.profile.values[0], 0.0);
    let (_, peak) = w.profile.argmax();
    assert!(peak >= 2f64.sqrt());
    assert!(w.residual_sup <= cfg.shoot_tol);
    assert!(w.bracket_history.iter().any(|&(_, c)| c == ShotClass::Undershoot));
    assert!(w.bracket_history.iter().any(|&(_, c)| c == ShotClass::Overshoot));
}

#[test]
fn shooting_matches_fd_oracle() {
    let cfg = NumericsConfig::default();
    for (n, p, r) in [(3, 3.0, 1.0), (2, 3.0, 2.0)] {
        let pr = params(n, p);
        let w = solve_exterior_ground_state(&pr, r, &cfg).unwrap();
        let fd = fd_bvp_oracle(&pr, r, &cfg).unwrap();
        let d = sup_distance(&w.profile, &fd);
        assert!(d < 1e-5, "N={n} p={p} R={r}: sup distance {d}");
        let (_, peak_s) = w.profile.peak();
        let (_, peak_f) = fd.peak();
        assert!(((peak_s - peak_f) / peak_f).abs() < 1e-6);
        let slope_rel = (w.slope_star - fd.derivatives[0]).abs() / w.slope_star;
        assert!(slope_rel < 1e-6, "slope mismatch {slope_rel}");
    }
}

#[test]
fn fd_oracle_refuses_zero_guess() {
    let cfg = NumericsConfig::default();
    let problem = FdProblem::new(&params(3, 3.0), InnerCondition::Dirichlet(1.0), 1.0, &cfg).unwrap();
    let zero = vec![0.0; problem.grid().len()];
    assert!(matches!(problem.solve_from(&zero), Err(Error::OracleFailure(_))));
}

#[test]
fn accepted_profile_satisfies_the_ode_nodewise() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let w = solve_exterior_ground_state(&pr, 1.0, &cfg).unwrap();
    let defect = profile_defect(&w.profile, &pr, &cfg).unwrap();
    assert!(defect < cfg.shoot_tol, "defect {defect}");
}

#[test]
fn rescale_to_unit_transports_profile() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let w = solve_exterior_ground_state(&pr, 2.0, &cfg).unwrap();
    let u = rescale_to_unit(&w, 2.0).unwrap();
    assert_eq!(u.lambda, 0.25);
    assert_eq!(u.r0(), 1.0);
    assert_eq!(u.eval(1.0), 0.0);
    assert!((u.argmax().1 - w.profile.argmax().1).abs() < 1e-8);
    for &r in &[1.3, 2.0, 3.7, 6.0] {
        assert!((u.eval(r) - w.profile.eval(2.0 * r)).abs() < 1e-12);
    }

    // u solves λ(u'' + (N-1) R coth(Rr) u') + u^p - u = 0 with λ = 1/R².
    let nodes = u.nodes();
    let mut worst: f64 = 0.0;
    let d = &u.derivatives;
    for i in 2..nodes.len() / 4 {
        let h = nodes[i + 1] - nodes[i];
        let ddu = (-d[i + 2] + 8.0 * d[i + 1] - 8.0 * d[i - 1] + d[i - 2]) / (12.0 * h);
        let (_, _, coth) = metric_factors(2.0 * nodes[i]).unwrap();
        let v = u.values[i];
        let res = 0.25 * (ddu + 2.0 * 2.0 * coth * u.derivatives[i]) + v.powi(3) - v;
        worst = worst.max(res.abs());
    }
    assert!(worst < 1e-4, "transported residual {worst}");

    // The warped λ-form at λ = 1/R² is the same problem.
    let direct = solve_unit_ground_state(&pr, 0.25, &cfg).unwrap();
    let d = sup_distance(&direct.profile, &u);
    assert!(d < 1e-6, "rescaled vs direct {d}");
}

#[test]
fn rescale_rejects_wrong_radius() {
    let cfg = NumericsConfig::default();
    let w = solve_exterior_ground_state(&params(2, 3.0), 1.0, &cfg).unwrap();
    assert!(rescale_to_unit(&w, 2.0).is_err());
    assert!(rescale_to_unit(&w, -1.0).is_err());
}

#[test]
fn lambda_derivative_matches_dilation_differences() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let lam = 0.5;
    let u = solve_unit_ground_state(&pr, lam, &cfg).unwrap().profile;
    let du = lambda_derivative(&u, &pr).unwrap();

    assert_eq!(du.values[0], -u.derivatives[0] / (2.0 * lam));
    let (rc, _) = u.peak();
    let at_peak = du.eval(rc).abs() / du.values[0].abs();
    assert!(at_peak < 1e-6, "u_dot at the peak {at_peak}");

    let dilated = |l: f64, r: f64| u.eval(r * (lam / l).sqrt());
    let mut err = [0.0f64; 2];
    for (k, h) in [1e-3 * lam, 0.5e-3 * lam].into_iter().enumerate() {
        for j in 0..20 {
            let r = 1.05 + 0.3 * j as f64;
            let fd = (dilated(lam + h, r) - dilated(lam - h, r)) / (2.0 * h);
            err[k] = err[k].max((fd - du.eval(r)).abs());
        }
    }
    assert!(err[0] < 1e-4, "central difference error {}", err[0]);
    // Halving h shrinks the discrepancy; interpolation noise limits the rate.
    assert!(err[1] < 0.6 * err[0], "errors {err:?}");
}

#[test]
fn true_lambda_family_is_pinned_at_the_boundary() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let lam = 0.5;
    let h = 1e-3 * lam;
    let up = solve_unit_ground_state(&pr, lam + h, &cfg).unwrap().profile;
    let um = solve_unit_ground_state(&pr, lam - h, &cfg).unwrap().profile;
    let u = solve_unit_ground_state(&pr, lam, &cfg).unwrap().profile;
    let du = lambda_derivative(&u, &pr).unwrap();
    let true_at_one = (up.eval(1.0) - um.eval(1.0)) / (2.0 * h);
    assert_eq!(true_at_one, 0.0);
    assert!(du.values[0].abs() > 1.0);
}

#[test]
fn whole_space_state_is_regular_and_decreasing() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let u = solve_whole_space_ground_state(&pr, &cfg).unwrap();
    assert_eq!(u.r0(), 0.0);
    assert!(u.derivatives[0].abs() < 1e-12);
    assert!(u.derivatives[1..].iter().all(|&d| d < 0.0));
    let fd = fd_whole_space_oracle(&pr, &cfg).unwrap();
    assert!(((u.values[0] - fd.values[0]) / fd.values[0]).abs() < 1e-6);
}

#[test]
fn decay_metadata_matches_exponent() {
    let cfg = NumericsConfig::default();
    let pr = params(2, 3.0);
    let w = solve_exterior_ground_state(&pr, 1.0, &cfg).unwrap();
    let gamma = decay_exponent_nonlinear(&pr, 1.0).unwrap();
    assert!((w.profile.decay_exponent - gamma).abs() < 1e-14);
    assert!((w.profile.r_max() - 31.0).abs() < 1e-12);
}

#[test]
fn convergence_study_inputs() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let single = convergence_study(&pr, &[0.5], &cfg).unwrap();
    assert_eq!(single.len(), 1);
    assert!(single[0].h1_distance >= 0.0);
    assert!(convergence_study(&pr, &[], &cfg).is_err());
    assert!(convergence_study(&pr, &[0.5, 1.0], &cfg).is_err());
    assert!(convergence_study(&pr, &[1.0, -0.5], &cfg).is_err());
}

#[test]
fn cache_serves_concurrent_readers() {
    let cache = Arc::new(UnitProfileCache::new(params(2, 3.0), NumericsConfig::default()));
    let first = cache.get(0.7).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let c = Arc::clone(&cache);
            std::thread::spawn(move || c.get(0.7).unwrap())
        })
        .collect();
    for h in handles {
        assert!(Arc::ptr_eq(&first, &h.join().unwrap()));
    }
    assert_eq!(cache.len(), 1);
}
