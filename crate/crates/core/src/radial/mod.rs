//! Radial ground-state solvers: the exterior state `w_R`, its unit-radius
//! form `u_λ`, the whole-space state `U`, and a finite-difference oracle.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::gauss_legendre;
use crate::model::{ModelParams, NumericsConfig, RadialGrid, RadialProfile, Warp};
use crate::ode::{Control, Dopri5};

pub mod equation;
pub mod fd;
pub mod shooting;

pub use equation::RadialEquation;
pub use fd::{fd_bvp_oracle, fd_bvp_oracle_lambda, fd_whole_space_oracle};
pub use shooting::{
    solve_exterior_ground_state, solve_exterior_lambda, solve_unit_ground_state,
    solve_whole_space_detailed, solve_whole_space_ground_state, ShootingResult, ShotClass,
};

/// Pull `w_R` back to the unit sphere: `u(r) = w(R r)`, stored with
/// `λ = 1/R²` as metadata.
///
/// In hyperbolic space `x ↦ Rx` is not an isometry up to scale, so `u`
/// solves `λ(u'' + (N-1)R coth(Rr) u') + u^p - u = 0`, not the `λ`-form on
/// `(1, ∞)`; use [`solve_unit_ground_state`] for the latter.
pub fn rescale_to_unit(w: &ShootingResult, big_r: f64) -> Result<RadialProfile> {
    if !(big_r > 0.0) {
        return Err(Error::InvalidParams(format!("radius must be positive, got {big_r}")));
    }
    let profile = &w.profile;
    if (profile.r0() - big_r).abs() > 1e-12 * big_r {
        return Err(Error::Incompatible(format!(
            "profile starts at {} but R = {big_r}",
            profile.r0()
        )));
    }
    let nodes: Vec<f64> = profile.nodes().iter().map(|r| r / big_r).collect();
    RadialProfile::new(
        RadialGrid::new(nodes)?,
        profile.values.clone(),
        profile.derivatives.iter().map(|d| d * big_r).collect(),
        profile.decay_exponent * big_r,
        profile.weight_power,
        1.0 / (big_r * big_r),
    )
}

/// `u̇(r) = -u'(r) r / (2λ)`, with its derivative `-(u'' r + u')/(2λ)`
/// where `u''` comes from the `λ`-form equation.
///
/// This is the derivative of the dilation family `λ' ↦ u(r√(λ/λ'))`.
pub fn lambda_derivative(u: &RadialProfile, params: &ModelParams) -> Result<RadialProfile> {
    let lam = u.lambda;
    if !(lam > 0.0) {
        return Err(Error::InvalidParams("profile carries no positive lambda".into()));
    }
    let eq = RadialEquation::new(params, lam);
    let (values, derivs): (Vec<f64>, Vec<f64>) = u
        .nodes()
        .iter()
        .zip(u.values.iter().zip(&u.derivatives))
        .map(|(&r, (&w, &dw))| {
            let ddw = eq.second_derivative(r, w, dw);
            (-dw * r / (2.0 * lam), -(ddw * r + dw) / (2.0 * lam))
        })
        .unzip();
    RadialProfile::new(u.grid.clone(), values, derivs, u.decay_exponent, u.weight_power, lam)
}

/// Largest discrepancy between each stored node state and the state obtained
/// by integrating the equation from the previous node.
pub fn profile_defect(profile: &RadialProfile, params: &ModelParams, cfg: &NumericsConfig) -> Result<f64> {
    let eq = RadialEquation::new(params, profile.lambda);
    let nodes = profile.nodes();
    let mut worst: f64 = 0.0;
    for i in 0..nodes.len() - 1 {
        let mut ode = Dopri5::new(cfg.ode_rel_tol, cfg.ode_abs_tol);
        let y0 = [profile.values[i], profile.derivatives[i]];
        let (_, y) = ode.integrate(|r, y: &[f64; 2]| eq.rhs(r, y), nodes[i], y0, nodes[i + 1], |_, _| {
            Control::Continue
        })?;
        let d = (y[0] - profile.values[i + 1])
            .abs()
            .max((y[1] - profile.derivatives[i + 1]).abs());
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Memoized `u_λ` for one `(params, cfg)` pair. Reads run concurrently;
/// inserts take the write lock.
#[derive(Debug)]
pub struct UnitProfileCache {
    params: ModelParams,
    cfg: NumericsConfig,
    map: RwLock<HashMap<u64, Arc<ShootingResult>>>,
}

impl UnitProfileCache {
    pub fn new(params: ModelParams, cfg: NumericsConfig) -> Self {
        UnitProfileCache {
            params,
            cfg,
            map: RwLock::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn config(&self) -> &NumericsConfig {
        &self.cfg
    }

    pub fn get(&self, lambda: f64) -> Result<Arc<ShootingResult>> {
        let key = lambda.to_bits();
        if let Some(hit) = self.map.read().expect("cache lock poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let solved = Arc::new(solve_unit_ground_state(&self.params, lambda, &self.cfg)?);
        let mut map = self.map.write().expect("cache lock poisoned");
        Ok(Arc::clone(map.entry(key).or_insert(solved)))
    }

    pub fn profile(&self, lambda: f64) -> Result<RadialProfile> {
        Ok(self.get(lambda)?.profile.clone())
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub radius: f64,
    pub h1_distance: f64,
}

/// Weighted `H¹` distance between `w_R` (extended by zero to `[0, R]`) and
/// the whole-space ground state `U`, for each radius.
pub fn convergence_study(
    params: &ModelParams,
    radii: &[f64],
    cfg: &NumericsConfig,
) -> Result<Vec<ConvergencePoint>> {
    if radii.is_empty() {
        return Err(Error::InvalidParams("no radii given".into()));
    }
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParams("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParams("radii must be strictly decreasing".into()));
    }
    let whole = solve_whole_space_ground_state(params, cfg)?;
    radii
        .iter()
        .map(|&big_r| {
            let w = solve_exterior_ground_state(params, big_r, cfg)?;
            let d = h1_distance_zero_extended(&w.profile, &whole, params.weight_power())?;
            Ok(ConvergencePoint {
                radius: big_r,
                h1_distance: d,
            })
        })
        .collect()
}

/// `(∫ S_λ^m(r) ((f-g)'² + (f-g)²) dr)^{1/2}` with `f = 0` below its inner
/// radius, by composite Gauss–Legendre on panels aligned with the nodes of
/// both profiles.
pub fn h1_distance_zero_extended(f: &RadialProfile, g: &RadialProfile, m: i32) -> Result<f64> {
    if f.lambda != g.lambda {
        return Err(Error::Incompatible("profiles carry different lambda".into()));
    }
    let warp = Warp::new(f.lambda)?;
    let r_end = f.r_max().max(g.r_max());
    let mut breaks: Vec<f64> = f.nodes().iter().chain(g.nodes()).copied().filter(|&r| r >= g.r0()).collect();
    breaks.push(r_end);
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let (gx, gw) = gauss_legendre(4);
    let r0 = f.r0();
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, wq) in gx.iter().zip(&gw) {
            let r = mid + half * x;
            let (fv, fd) = if r < r0 { (0.0, 0.0) } else { f.eval_with_derivative(r) };
            let (gv, gd) = g.eval_with_derivative(r);
            let weight = if r > 0.0 { warp.weight(r, m) } else { 0.0 };
            total += wq * half * weight * ((fd - gd).powi(2) + (fv - gv).powi(2));
        }
    }
    Ok(total.sqrt())
}
