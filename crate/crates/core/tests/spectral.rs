use hyperbif::harmonics::{group_restricted_spectrum, sphere_eigenvalue, GroupKind, SymmetryGroup};
use hyperbif::radial::solve_unit_ground_state;
use hyperbif::spectral::*;
use hyperbif::{Error, ModelParams, NumericsConfig, RadialGrid, RadialProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(n: usize, p: f64) -> ModelParams {
    ModelParams::new(n, p).unwrap()
}

fn ground_state(pr: &ModelParams, lambda: f64) -> RadialProfile {
    solve_unit_ground_state(pr, lambda, &NumericsConfig::default()).unwrap().profile
}

fn icosahedral() -> hyperbif::harmonics::GroupSpectrum {
    group_restricted_spectrum(&SymmetryGroup::new(GroupKind::Icosahedral, 3).unwrap(), 12).unwrap()
}

#[test]
fn radial_morse_index_is_one() {
    let cfg = NumericsConfig::default();
    for (n, p, lam) in [(3, 3.0, 1.0), (2, 3.0, 0.5), (4, 2.0, 2.0)] {
        let pr = params(n, p);
        let u = ground_state(&pr, lam);
        let pairs = radial_spectrum(&u, &pr, 2, &cfg).unwrap();
        assert!(pairs[0].eigenvalue < 0.0);
        assert!(pairs[1].eigenvalue > 0.0, "N={n}: {}", pairs[1].eigenvalue);
        let z = &pairs[0].eigenfunction.values;
        assert!(z[1..z.len()].iter().all(|&v| v > 0.0));
    }
}

#[test]
fn ground_eigenvalue_is_resolution_stable() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let u = ground_state(&pr, 1.0);
    let a = radial_spectrum_on(&u, &pr, 1, &cfg, 1 << 15).unwrap()[0].eigenvalue;
    let b = radial_spectrum_on(&u, &pr, 1, &cfg, 1 << 16).unwrap()[0].eigenvalue;
    assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
    assert_eq!(ground_eigenvalue(&u, &pr, &cfg).unwrap(), b);
}

#[test]
fn rayleigh_and_separated_identities() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let lam = 1.0;
    let u = ground_state(&pr, lam);
    let pair = radial_spectrum(&u, &pr, 1, &cfg).unwrap().remove(0);
    let tau0 = pair.eigenvalue;
    let z = pair.eigenfunction;
    assert!((weighted_mass(&z, &pr, 0).unwrap() - 1.0).abs() < 1e-12);

    let radial = ModeFunction::single(z.clone(), 0);
    let q0 = quadratic_form_q(&radial, &u, &pr).unwrap();
    assert!((q0 - tau0).abs() < 1e-8, "Rayleigh defect {}", q0 - tau0);

    let i1 = icosahedral().first().unwrap().i;
    let mu = sphere_eigenvalue(i1, 3);
    let mode = ModeFunction::single(z.clone(), i1);
    let q1 = quadratic_form_q(&mode, &u, &pr).unwrap();
    let want = tau0 + lam * mu * weighted_mass(&z, &pr, -2).unwrap();
    assert!((q1 - want).abs() < 1e-8);

    // Trace zero: the two forms agree; both are quadratic.
    assert_eq!(quadratic_form_qtilde(&mode, &u, &pr).unwrap(), q1);
    let doubled = ModeFunction::single(z.scaled(2.0), i1);
    let q2 = quadratic_form_q(&doubled, &u, &pr).unwrap();
    assert!((q2 - 4.0 * q1).abs() < 1e-12 * q2.abs());
}

#[test]
fn q_rejects_nonzero_trace() {
    let pr = params(3, 3.0);
    let u = ground_state(&pr, 1.0);
    let grid = RadialGrid::uniform(1.0, 10.0, 900).unwrap();
    let vals: Vec<f64> = grid.nodes().iter().map(|&r| (-(r - 1.0)).exp()).collect();
    let ders: Vec<f64> = vals.iter().map(|v| -v).collect();
    let prof = RadialProfile::new(grid, vals, ders, 1.0, 2, 1.0).unwrap();
    let mode = ModeFunction::single(prof, 6);
    assert!(matches!(quadratic_form_q(&mode, &u, &pr), Err(Error::Precondition(_))));
    let qt = quadratic_form_qtilde(&mode, &u, &pr).unwrap();
    assert!(qt.is_finite());
}

#[test]
fn boundary_constant_in_the_plane() {
    let pr = params(2, 3.0);
    let c = boundary_coefficient(&pr, 1.0) / 1f64.sinh();
    let e2 = 1f64.exp().powi(2);
    assert!((c - (e2 + 1.0) / (e2 - 1.0)).abs() < 1e-14);
    assert!((c - 1.313035).abs() < 1e-6);
    // Exterior of B_R at λ = 1/R²: λ R coth(R) S_λ(1), S_λ(1) = sinh(R)/R.
    let big_r = 2.0f64;
    let lam = 1.0 / (big_r * big_r);
    let expected = lam * big_r / big_r.tanh() * big_r.sinh() / big_r;
    assert!((boundary_coefficient(&pr, lam) - expected).abs() < 1e-13);
}

#[test]
fn lambda0_bound_from_an_eigensolve() {
    let cfg = NumericsConfig::default();
    let pr = params(3, 3.0);
    let u = ground_state(&pr, 1.0);
    let tau0 = ground_eigenvalue(&u, &pr, &cfg).unwrap();
    let mu = icosahedral().first().unwrap().mu;
    assert_eq!(mu, 42.0);
    let b = lambda0_lower_bound(tau0, mu).unwrap();
    assert!(b > 0.0);
    assert!((b - (-tau0) * 1f64.sinh().powi(2) / 42.0).abs() < 1e-15);
}

#[test]
fn weighted_boundary_inequality_on_random_bumps() {
    let zero = weighted_boundary_inequality_check(&BumpSum::zero(), 3, 8.0 / 3.0, 1.0).unwrap();
    assert_eq!(zero, (0.0, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let n = 2 + trial % 3;
        let lambda_w = 4.0 * (n as f64 - 1.0) / 3.0;
        let r = rng.random_range(0.1..3.0);
        let g = BumpSum::random(&mut rng, r);
        let (lhs, rhs) = weighted_boundary_inequality_check(&g, n, lambda_w, r).unwrap();
        if rhs > 0.0 {
            worst = worst.max(lhs / rhs);
        }
    }
    assert!(worst <= 1.0, "tightest ratio {worst}");
}

#[test]
fn trace_inequality_for_icosahedral_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let i1 = icosahedral().first().unwrap().i;
    let big_r = 1.0;
    let grid = RadialGrid::uniform(big_r, big_r + 8.0, 8000).unwrap();
    for _ in 0..50 {
        let g = BumpSum::random(&mut rng, big_r);
        let mut vals: Vec<f64> = grid.nodes().iter().map(|&r| g.eval(r).0).collect();
        let ders: Vec<f64> = grid.nodes().iter().map(|&r| g.eval(r).1).collect();
        *vals.last_mut().unwrap() = 0.0;
        let prof = RadialProfile::new(grid.clone(), vals, ders, 1.0, 2, 1.0).unwrap();
        let coeffs = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let mode = ModeFunction::new(prof, i1, coeffs).unwrap();
        let (lhs, rhs) = trace_inequality_check(&[mode], 3, big_r).unwrap();
        assert!(lhs <= rhs);
    }
    assert_eq!(trace_inequality_check(&[], 3, big_r).unwrap(), (0.0, 0.0));
}

#[test]
fn trace_inequality_requires_symmetry() {
    let grid = RadialGrid::uniform(1.0, 5.0, 400).unwrap();
    let vals: Vec<f64> = grid.nodes().iter().map(|&r| (5.0 - r) / 4.0).collect();
    let ders = vec![-0.25; vals.len()];
    let prof = RadialProfile::new(grid, vals, ders, 1.0, 2, 1.0).unwrap();
    let mode = ModeFunction::single(prof, 1);
    assert!(matches!(trace_inequality_check(&[mode], 3, 1.0), Err(Error::Precondition(_))));
}

#[test]
fn qtilde_is_positive_for_large_lambda() {
    let pr = params(3, 3.0);
    let u = ground_state(&pr, 20.0);
    let search = constrained_trial_search(&u, &pr, &icosahedral(), 2, 500, 1 << 13, 3).unwrap();
    assert_eq!(search.trials, 500);
    assert_eq!(search.negative_count, 0, "min ratio {}", search.min_ratio);
    assert!(search.min_ratio > 0.0);
}

#[test]
fn key_constant_is_below_one() {
    assert!(trace_constant() < 1.0);
    assert!((trace_constant() - 0.9848).abs() < 1e-4);
}
