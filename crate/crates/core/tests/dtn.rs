use std::sync::OnceLock;

use hyperbif::dtn::*;
use hyperbif::harmonics::{group_restricted_spectrum, sphere_quadrature, GroupKind, GroupSpectrum, SymmetryGroup};
use hyperbif::model::tail_exponent;
use hyperbif::radial::UnitProfileCache;
use hyperbif::spectral::{lambda0_self_consistent_bound, radial_spectrum};
use hyperbif::{Error, ModelParams, NumericsConfig, RadialProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Setup {
    params: ModelParams,
    cfg: NumericsConfig,
    group: SymmetryGroup,
    spectrum: GroupSpectrum,
    cache: UnitProfileCache,
}

fn icosahedral() -> &'static Setup {
    static SETUP: OnceLock<Setup> = OnceLock::new();
    SETUP.get_or_init(|| {
        let params = ModelParams::new(3, 3.0).unwrap();
        let cfg = NumericsConfig::default();
        let group = SymmetryGroup::new(GroupKind::Icosahedral, 3).unwrap();
        let spectrum = group_restricted_spectrum(&group, 12).unwrap();
        let cache = UnitProfileCache::new(params, cfg.clone());
        Setup { params, cfg, group, spectrum, cache }
    })
}

impl Setup {
    fn u(&self, lambda: f64) -> RadialProfile {
        self.cache.profile(lambda).unwrap()
    }

    fn sigma(&self, degree: usize, lambda: f64) -> f64 {
        sigma_eigenvalue(degree, &self.u(lambda), &self.params, &self.cfg).unwrap()
    }

    fn random_boundary(&self, rng: &mut ChaCha8Rng) -> BoundaryFunction {
        let modes = self
            .spectrum
            .entries
            .iter()
            .map(|e| (e.i, (0..e.m).map(|_| rng.random_range(-1.0..1.0)).collect()))
            .collect();
        BoundaryFunction::new(self.group, &self.spectrum, modes).unwrap()
    }
}

#[test]
fn boundary_constant_pins() {
    let pr = ModelParams::new(3, 3.0).unwrap();
    assert!((boundary_constant(&pr, 1.0) - 2.0 * 1.313035).abs() < 2e-6);
    let e2 = 1f64.exp().powi(2);
    assert!((boundary_constant(&pr, 1.0) - 2.0 * (e2 + 1.0) / (e2 - 1.0)).abs() < 1e-14);
    // λ = 1/R²: (N-1) R coth(R).
    let r = 3.0f64;
    assert!((boundary_constant(&pr, 1.0 / (r * r)) - 2.0 * r / r.tanh()).abs() < 1e-13);
}

#[test]
fn mode_solution_boundary_tail_and_resolution() {
    let s = icosahedral();
    let u = s.u(5.0);
    let c = solve_mode_ode(6, &u, &s.params, &s.cfg).unwrap();
    assert_eq!(c.values[0], 1.0);

    let kappa = tail_exponent(&s.params, 5.0, 0.0).unwrap();
    let r = c.r_max() - 5.0;
    let (v, d) = c.eval_with_derivative(r);
    assert!((-d / v - kappa).abs() < 5e-2, "tail slope {} vs {kappa}", -d / v);

    let n = s.cfg.mode_intervals;
    let coarse = solve_mode_ode_on(6, &u, &s.params, n / 2).unwrap();
    let fine = solve_mode_ode_on(6, &u, &s.params, n).unwrap();
    let sup = coarse
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (v - fine.values[2 * i]).abs())
        .fold(0.0, f64::max);
    assert!(sup < 1e-6, "resolution change moved c by {sup}");
}

#[test]
fn sigma_is_ordered_in_degree_and_positive_for_large_lambda() {
    let s = icosahedral();
    for lam in [1.8, 3.0, 8.0, 20.0, 50.0] {
        let sig: Vec<f64> = s.spectrum.entries.iter().map(|e| s.sigma(e.i, lam)).collect();
        assert!(sig.windows(2).all(|w| w[0] < w[1]), "lambda {lam}: {sig:?}");
    }
    assert!(s.sigma(6, 50.0) > 0.0);
}

#[test]
fn sigma_matches_variational_minimum() {
    let s = icosahedral();
    for lam in [2.5, 10.0, 50.0] {
        let u = s.u(lam);
        let direct = s.sigma(6, lam);
        let var = sigma_variational(6, &u, &s.params, 20_000).unwrap();
        assert!((direct - var).abs() < 1e-4, "lambda {lam}: {direct} vs {var}");
    }
}

#[test]
fn mode_solve_near_a_pole_is_degenerate() {
    let s = icosahedral();
    let pole = dirichlet_pole(6, 1.0, 3.0, &s.cache).unwrap();
    assert!(dirichlet_mode_gap(6, pole * (1.0 - 1e-3), &s.cache).unwrap() < 0.0);
    assert!(dirichlet_mode_gap(6, pole * (1.0 + 1e-3), &s.cache).unwrap() > 0.0);
    // σ runs to -∞ just above the pole.
    assert!(s.sigma(6, pole * (1.0 + 1e-4)) < -100.0);
}

#[test]
fn h_is_diagonal_linear_and_self_adjoint() {
    let s = icosahedral();
    let lam = 4.0;
    let u = s.u(lam);
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let single = BoundaryFunction::new(s.group, &s.spectrum, vec![(6, vec![0.7])]).unwrap();
    let h = apply_h(&single, &u, &s.params, &s.cfg).unwrap();
    assert_eq!(h.modes[0].0, 6);
    assert!((h.modes[0].1[0] - 0.7 * s.sigma(6, lam)).abs() < 1e-14);

    let v1 = s.random_boundary(&mut rng);
    let v2 = s.random_boundary(&mut rng);
    let (a, b) = (0.3, -1.7);
    let lhs = apply_h(&v1.combine(a, &v2, b).unwrap(), &u, &s.params, &s.cfg).unwrap();
    let rhs = apply_h(&v1, &u, &s.params, &s.cfg)
        .unwrap()
        .combine(a, &apply_h(&v2, &u, &s.params, &s.cfg).unwrap(), b)
        .unwrap();
    let diff = lhs.combine(1.0, &rhs, -1.0).unwrap();
    assert!(diff.inner(&diff).sqrt() < 1e-12);

    // Self-adjointness on 100 random pairs; the multipliers are shared.
    let sig: Vec<(usize, f64)> = s.spectrum.entries.iter().map(|e| (e.i, s.sigma(e.i, lam))).collect();
    let apply = |v: &BoundaryFunction| BoundaryFunction {
        group: v.group,
        modes: v
            .modes
            .iter()
            .map(|(d, c)| {
                let m = sig.iter().find(|(i, _)| i == d).unwrap().1;
                (*d, c.iter().map(|x| m * x).collect())
            })
            .collect(),
    };
    assert_eq!(apply(&v1), apply_h(&v1, &u, &s.params, &s.cfg).unwrap());
    for _ in 0..100 {
        let x = s.random_boundary(&mut rng);
        let y = s.random_boundary(&mut rng);
        let defect = (apply(&x).inner(&y) - x.inner(&apply(&y))).abs();
        assert!(defect < 1e-8);
    }

    // H² multiplies by σ².
    let hh = apply(&apply(&v1));
    for ((d, c), (_, c0)) in hh.modes.iter().zip(&v1.modes) {
        let m = sig.iter().find(|(i, _)| i == d).unwrap().1;
        for (x, y) in c.iter().zip(c0) {
            assert!((x - m * m * y).abs() < 1e-12 * (1.0 + (m * m * y).abs()));
        }
    }
}

#[test]
fn boundary_functions_validate_their_modes() {
    let s = icosahedral();
    let bad_degree = BoundaryFunction::new(s.group, &s.spectrum, vec![(5, vec![1.0])]);
    assert!(matches!(bad_degree, Err(Error::InvalidParams(_))));
    let bad_len = BoundaryFunction::new(s.group, &s.spectrum, vec![(6, vec![1.0, 2.0])]);
    assert!(matches!(bad_len, Err(Error::InvalidParams(_))));
    let other = SymmetryGroup::new(GroupKind::Octahedral, 3).unwrap();
    assert!(matches!(
        BoundaryFunction::new(other, &s.spectrum, vec![]),
        Err(Error::Incompatible(_))
    ));
}

#[test]
fn dirichlet_extension_side_conditions_and_maximum_principle() {
    let s = icosahedral();
    let lam = 5.0;
    let u = s.u(lam);
    let z = radial_spectrum(&u, &s.params, 1, &s.cfg).unwrap().remove(0).eigenfunction;

    let single = BoundaryFunction::new(s.group, &s.spectrum, vec![(6, vec![1.0])]).unwrap();
    let ext = dirichlet_extension(&single, &u, &z, &s.params, &s.cfg).unwrap();
    let c = solve_mode_ode(6, &u, &s.params, &s.cfg).unwrap();
    assert_eq!(ext[0].radial.values, c.values);

    let quad = sphere_quadrature(3, 12).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let v = s.random_boundary(&mut rng);
        let ext = dirichlet_extension(&v, &u, &z, &s.params, &s.cfg).unwrap();
        let basis = v.basis().unwrap();
        // Angular parts at the quadrature nodes.
        let angular: Vec<Vec<f64>> = v
            .modes
            .iter()
            .zip(&basis)
            .map(|((_, a), fns)| quad.points.iter().map(|x| fns.iter().zip(a).map(|(f, c)| c * f.eval(x)).sum()).collect())
            .collect();
        let sup_v = (0..quad.len()).map(|q| angular.iter().map(|a| a[q]).sum::<f64>().abs()).fold(0.0, f64::max);
        let nodes = ext[0].radial.nodes();
        let mut sup_psi: f64 = 0.0;
        for i in (0..nodes.len()).step_by(64) {
            for q in 0..quad.len() {
                let val: f64 = ext.iter().zip(&angular).map(|(m, a)| m.radial.values[i] * a[q]).sum();
                sup_psi = sup_psi.max(val.abs());
            }
        }
        assert!(sup_psi <= sup_v * (1.0 + 1e-12), "{sup_psi} > {sup_v}");
    }
}

#[test]
fn sigma_curve_changes_sign_on_the_default_grid() {
    let s = icosahedral();
    let grid = default_lambda_grid(&s.cache, &s.spectrum, 50.0, 40).unwrap();
    let bound = lambda0_self_consistent_bound(&s.cache, 42.0).unwrap();
    assert!((grid[0] - 1.05 * bound).abs() < 1e-12 * grid[0]);
    assert_eq!(*grid.last().unwrap(), 50.0);
    let curve = sigma_curve(6, &grid, &s.cache).unwrap();
    let negative_left: Vec<_> = curve.brackets().into_iter().filter(|(l, _)| l.1 < 0.0).collect();
    assert!(!negative_left.is_empty());
    let csv = curve.to_csv();
    assert!(csv.starts_with("lambda,sigma,degree\n"));
    assert_eq!(csv.lines().count(), grid.len() + 1);
}

#[test]
fn sigma_curve_steps_shrink_under_refinement() {
    let s = icosahedral();
    let max_step = |n: usize| {
        let grid = log_grid(2.0, 50.0, n);
        let c = sigma_curve(6, &grid, &s.cache).unwrap();
        c.samples.windows(2).map(|w| (w[1].1 - w[0].1).abs()).fold(0.0, f64::max)
    };
    let steps: Vec<f64> = [9, 17, 33, 65].into_iter().map(max_step).collect();
    assert!(steps.windows(2).all(|w| w[1] < w[0]), "steps {steps:?}");
    assert!(steps[3] < 0.3 * steps[0], "steps {steps:?}");
}

#[test]
fn sigma_curve_rejects_bad_grids() {
    let s = icosahedral();
    assert!(matches!(sigma_curve(6, &[], &s.cache), Err(Error::InvalidParams(_))));
    assert!(matches!(sigma_curve(6, &[3.0, 2.0], &s.cache), Err(Error::InvalidParams(_))));
}
