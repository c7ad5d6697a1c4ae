use hyperbif::model::decay_exponent_nonlinear;
use hyperbif::qualitative::*;
use hyperbif::radial::solve_exterior_ground_state;
use hyperbif::{Error, ModelParams, NumericsConfig};
use proptest::prelude::*;

fn params(n: usize, p: f64) -> ModelParams {
    ModelParams::new(n, p).unwrap()
}

#[test]
fn g_sign_is_negative_in_the_plane() {
    let pat = analyze_g_sign(&params(2, 3.0), 1.0, 2000).unwrap();
    assert_eq!(pat.kind, SignKind::AlwaysNegative);
    assert!(pat.change_point.is_none());
}

#[test]
fn g_sign_pattern_n3_p2_is_allowed_and_refinement_stable() {
    let pr = params(3, 2.0);
    let coarse = analyze_g_sign(&pr, 0.5, 500).unwrap();
    let fine = analyze_g_sign(&pr, 0.5, 2000).unwrap();
    assert_eq!(coarse.kind, fine.kind);
    if let Some(c) = fine.change_point {
        assert!(c > 0.5 && c < 30.5);
        let ge = GExponents::new(&pr);
        assert!(ge.f(c).abs() < 1e-10);
    }
}

#[test]
fn f_is_strictly_decreasing_for_n_at_least_three() {
    for (n, p) in [(3, 2.0), (3, 4.0), (4, 1.5), (5, 2.0)] {
        let ge = GExponents::new(&params(n, p));
        let rs: Vec<f64> = (0..400).map(|i| 0.05 + 0.05 * i as f64).collect();
        assert!(rs.windows(2).all(|w| ge.f_decaying(w[1]) < ge.f_decaying(w[0])), "N={n} p={p}");
        assert!(rs.windows(2).all(|w| ge.f(w[1]) <= ge.f(w[0])));
    }
}

#[test]
fn small_inner_radius_produces_one_sign_change() {
    // coth² blows up near 0, and the coefficient of coth² is positive for N ≥ 3.
    let pat = analyze_g_sign(&params(3, 2.0), 0.05, 2000).unwrap();
    assert_eq!(pat.kind, SignKind::OneSignChange);
}

#[test]
fn decay_rate_matches_gamma() {
    let cfg = NumericsConfig::default();
    for (n, p) in [(2, 3.0), (3, 2.0)] {
        let pr = params(n, p);
        let w = solve_exterior_ground_state(&pr, 1.0, &cfg).unwrap();
        let rate = estimate_decay_rate(&w.profile, (20.0, 28.0)).unwrap();
        let gamma = decay_exponent_nonlinear(&pr, 1.0).unwrap();
        assert!((rate - gamma).abs() < 1e-2, "N={n}: {rate} vs {gamma}");
        let bound = decay_ratio_bound(&pr);
        for (&v, &d) in w.profile.values[1..].iter().zip(&w.profile.derivatives[1..]) {
            assert!(-d / v < bound);
        }
    }
    let g2 = decay_exponent_nonlinear(&params(2, 3.0), 1.0).unwrap();
    assert!((g2 - 1.618).abs() < 1e-3);
}

#[test]
fn decay_window_rejects_zero_and_outside() {
    let cfg = NumericsConfig::default();
    let w = solve_exterior_ground_state(&params(2, 3.0), 1.0, &cfg).unwrap();
    assert!(matches!(estimate_decay_rate(&w.profile, (1.0, 5.0)), Err(Error::Domain(_))));
    assert!(estimate_decay_rate(&w.profile, (20.0, 100.0)).is_err());
}

#[test]
fn energy_is_monotone_and_vanishes() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let w = solve_exterior_ground_state(&pr, 1.0, &cfg).unwrap();
    let e = energy_profile(&w.profile, &pr).unwrap();
    assert!(e.values.windows(2).all(|x| x[1] <= x[0] + 1e-12 * e.values[0]));
    assert!(e.values[e.len() - 1].abs() < 1e-6);
    let s = w.profile.derivatives[0];
    assert_eq!(e.values[0], 0.5 * s * s);
    assert!(e.values[0] > 0.0);
}

#[test]
fn energy_detects_tampering() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let mut w = solve_exterior_ground_state(&pr, 1.0, &cfg).unwrap().profile;
    w.derivatives[2000] = 5.0;
    assert!(matches!(energy_profile(&w, &pr), Err(Error::LemmaViolation { .. })));
}

#[test]
fn shape_check_reports_peak() {
    let cfg = NumericsConfig::default();
    for (n, p, bound) in [(3, 3.0, 2f64.sqrt()), (2, 5.0, 3f64.powf(0.25))] {
        let pr = params(n, p);
        let w = solve_exterior_ground_state(&pr, 1.0, &cfg).unwrap();
        let (r, peak) = profile_shape_check(&w.profile, &pr).unwrap();
        assert!(r > 1.0);
        assert!(peak >= bound);
    }
    assert!((3f64.powf(0.25) - 1.3161).abs() < 1e-4);
}

#[test]
fn shape_check_detects_second_critical_point() {
    let cfg = NumericsConfig::default();
    let pr = params(2, 3.0);
    let mut w = solve_exterior_ground_state(&pr, 1.0, &cfg).unwrap().profile;
    w.derivatives[3000] = 1.0;
    assert!(matches!(profile_shape_check(&w, &pr), Err(Error::LemmaViolation { .. })));
}

#[test]
fn report_passes_for_reference_state() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let w = solve_exterior_ground_state(&pr, 1.0, &cfg).unwrap();
    let report = qualitative_report(&pr, &w.profile, 1.0).unwrap();
    assert_eq!(report.len(), 4);
    assert!(report.iter().all(|v| v.passed()), "{report:?}");
    let text = serde_json::to_string(&report).unwrap();
    assert!(text.contains("\"verdict\":\"pass\""));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn g_sign_has_an_allowed_pattern(n in 2usize..6, t in 0.05f64..0.95, r in 0.01f64..5.0) {
        let p = match n {
            2 => 1.0 + 8.0 * t,
            _ => 1.0 + t * ((n as f64 + 2.0) / (n as f64 - 2.0) - 1.0),
        };
        let pr = params(n, p);
        let pat = analyze_g_sign(&pr, r, 600).unwrap();
        if n == 2 {
            prop_assert_eq!(pat.kind, SignKind::AlwaysNegative);
        }
        prop_assert_eq!(pat.change_point.is_some(), pat.kind == SignKind::OneSignChange);
    }
}
