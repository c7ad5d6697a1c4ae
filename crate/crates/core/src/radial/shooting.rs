//! Shooting solvers for the exterior ground state `w` (unknown slope at the
//! inner boundary) and the whole-space ground state `U` (unknown value at the
//! pole).
//!
//! A bisection on the shooting parameter brackets the decaying solution.
//! Because the decaying tail is unstable in the forward direction, the final
//! profile is assembled from a forward solve up to a matching radius and a
//! backward solve from the Robin-closed truncation radius, with a two-unknown
//! Newton iteration closing the jump at the matching radius.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{tail_exponent, ModelParams, NumericsConfig, RadialGrid, RadialProfile};
use crate::ode::{Control, Dopri5};
use crate::radial::equation::RadialEquation;

/// Outcome of one trial shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShotClass {
    /// Too little energy: the trajectory turns back up inside the potential
    /// well after its first maximum.
    Undershoot,
    /// Too much energy: the trajectory crosses zero, or exceeds the ceiling.
    Overshoot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    pub profile: RadialProfile,
    /// `w'(r0)` for exterior problems, `U(0)` for the whole-space problem.
    pub slope_star: f64,
    pub bracket_history: Vec<(f64, ShotClass)>,
    /// Jump in `(w, w')` left at the matching radius.
    pub residual_sup: f64,
    /// Radius where the forward and backward solves meet.
    pub matching_radius: f64,
}

/// Fraction of the peak below which the forward solve hands over to the
/// backward tail solve.
const MATCH_FRACTION: f64 = 0.1;
const POLE_START: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
enum Start {
    Boundary(f64),
    Pole,
}

struct Shooter<'a> {
    eq: RadialEquation,
    start: Start,
    cfg: &'a NumericsConfig,
    ceiling: f64,
    kappa: f64,
    grid: RadialGrid,
}

impl Shooter<'_> {
    fn ode(&self) -> Dopri5 {
        Dopri5::new(self.cfg.ode_rel_tol, self.cfg.ode_abs_tol)
    }

    fn r_start(&self) -> f64 {
        match self.start {
            Start::Boundary(r0) => r0,
            Start::Pole => POLE_START,
        }
    }

    /// Initial `(w, w', ∂w/∂q, ∂w'/∂q)` for shooting parameter `q`.
    fn initial(&self, q: f64) -> [f64; 4] {
        match self.start {
            Start::Boundary(_) => [0.0, q, 0.0, 1.0],
            Start::Pole => {
                let r = POLE_START;
                let nl = self.eq.drift + 1.0;
                let lam = self.eq.lambda;
                let f = q - q.powf(self.eq.p);
                let fq = 1.0 - self.eq.p * q.powf(self.eq.p - 1.0);
                [
                    q + r * r * f / (2.0 * nl * lam),
                    r * f / (nl * lam),
                    1.0 + r * r * fq / (2.0 * nl * lam),
                    r * fq / (nl * lam),
                ]
            }
        }
    }

    fn classify(&self, q: f64) -> Result<ShotClass> {
        let y0 = self.initial(q);
        let mut passed_peak = matches!(self.start, Start::Pole);
        let mut verdict = None;
        let ceiling = self.ceiling;
        let eq = self.eq;
        let (_, y) = self.ode().integrate(
            |r, y: &[f64; 2]| eq.rhs(r, y),
            self.r_start(),
            [y0[0], y0[1]],
            self.grid.r_max(),
            |_, y| {
                if y[0] > ceiling || y[0] < 0.0 {
                    verdict = Some(ShotClass::Overshoot);
                    return Control::Stop;
                }
                // Negative energy can never be raised back to the level of
                // the trivial state, so the trajectory is trapped.
                if eq.energy(y[0], y[1]) < 0.0 {
                    verdict = Some(ShotClass::Undershoot);
                    return Control::Stop;
                }
                if !passed_peak {
                    if y[1] < 0.0 {
                        passed_peak = true;
                    }
                } else if y[1] >= 0.0 {
                    verdict = Some(ShotClass::Undershoot);
                    return Control::Stop;
                }
                Control::Continue
            },
        )?;
        Ok(verdict.unwrap_or(if y[1] + self.kappa * y[0] >= 0.0 {
            ShotClass::Undershoot
        } else {
            ShotClass::Overshoot
        }))
    }

    fn forward_variational(&self, q: f64, r_end: f64) -> Result<[f64; 4]> {
        let eq = self.eq;
        let (_, y) = self.ode().integrate(
            |r, y: &[f64; 4]| eq.rhs_variational(r, y),
            self.r_start(),
            self.initial(q),
            r_end,
            |_, _| Control::Continue,
        )?;
        Ok(y)
    }

    fn backward_variational(&self, log_a: f64, r_end: f64) -> Result<[f64; 4]> {
        let eq = self.eq;
        let a = log_a.exp();
        let k = self.kappa;
        let (_, y) = self.ode().integrate(
            |r, y: &[f64; 4]| eq.rhs_variational(r, y),
            self.grid.r_max(),
            [a, -k * a, a, -k * a],
            r_end,
            |_, _| Control::Continue,
        )?;
        Ok(y)
    }

    fn mismatch(&self, q: f64, log_a: f64, r_m: f64) -> Result<([f64; 2], [[f64; 2]; 2])> {
        let f = self.forward_variational(q, r_m)?;
        let b = self.backward_variational(log_a, r_m)?;
        Ok(([f[0] - b[0], f[1] - b[1]], [[f[2], -b[2]], [f[3], -b[3]]]))
    }

    /// Bracket the shooting parameter between an undershoot and an overshoot
    /// and bisect down to `shoot_tol`.
    fn bracket(&self, lo0: f64, hi0: f64, history: &mut Vec<(f64, ShotClass)>) -> Result<(f64, f64)> {
        let mut lo = lo0;
        let mut hi = hi0;
        let mut doublings = 0;
        loop {
            let class = self.classify(hi)?;
            history.push((hi, class));
            if class == ShotClass::Overshoot {
                break;
            }
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > self.cfg.max_bisect || !hi.is_finite() {
                return Err(Error::NoBracket { doublings, last: hi });
            }
        }
        let mut iterations = 0;
        while hi - lo > self.cfg.shoot_tol * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || iterations >= self.cfg.max_bisect {
                break;
            }
            let class = self.classify(mid)?;
            history.push((mid, class));
            match class {
                ShotClass::Undershoot => lo = mid,
                ShotClass::Overshoot => hi = mid,
            }
            iterations += 1;
        }
        Ok((lo, hi))
    }

    /// First grid node past the maximum where the forward trajectory falls
    /// below `MATCH_FRACTION` of its peak; also returns the value there.
    fn matching_node(&self, q: f64) -> Result<(usize, f64)> {
        let nodes = self.grid.nodes();
        let eq = self.eq;
        let mut ode = self.ode();
        let y0 = self.initial(q);
        let mut y = [y0[0], y0[1]];
        let mut r = self.r_start();
        let mut peak = y[0];
        for (i, &node) in nodes.iter().enumerate().skip(1) {
            let (_, next) = ode.integrate(|t, s: &[f64; 2]| eq.rhs(t, s), r, y, node, |_, _| Control::Continue)?;
            y = next;
            r = node;
            peak = peak.max(y[0]);
            if y[1] < 0.0 && y[0] < MATCH_FRACTION * peak {
                if i + 2 >= nodes.len() {
                    break;
                }
                return Ok((i, y[0]));
            }
            if y[0] < 0.0 || (y[1] >= 0.0 && y[0] < peak) {
                break;
            }
        }
        Err(Error::Convergence(
            "forward trajectory never reached the matching region".into(),
        ))
    }

    fn solve(&self, lo0: f64, hi0: f64) -> Result<ShootingResult> {
        let mut history = Vec::new();
        let (lo, hi) = self.bracket(lo0, hi0, &mut history)?;
        let mut q = 0.5 * (lo + hi);
        let (m, w_m) = self.matching_node(q)?;
        let nodes = self.grid.nodes();
        let r_m = nodes[m];
        let r_max = self.grid.r_max();
        let mut log_a = w_m.ln() - self.kappa * (r_max - r_m);

        let (mut g, mut jac) = self.mismatch(q, log_a, r_m)?;
        let mut norm = g[0].abs().max(g[1].abs());
        for _ in 0..80 {
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det == 0.0 || !det.is_finite() {
                return Err(Error::Convergence("singular matching Jacobian".into()));
            }
            let dq = -(g[0] * jac[1][1] - g[1] * jac[0][1]) / det;
            let dl = -(jac[0][0] * g[1] - jac[1][0] * g[0]) / det;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let qt = q + t * dq;
                let lt = log_a + t * dl;
                let trial = self.mismatch(qt, lt, r_m);
                if let Ok((gt, jt)) = trial {
                    let nt = gt[0].abs().max(gt[1].abs());
                    if nt < norm || (nt <= norm && t == 1.0) {
                        q = qt;
                        log_a = lt;
                        g = gt;
                        jac = jt;
                        let improved = nt < 0.5 * norm;
                        norm = nt;
                        accepted = true;
                        if !improved && norm < self.cfg.shoot_tol {
                            t = 0.0;
                        }
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted || t == 0.0 || norm < 1e-14 {
                break;
            }
        }
        if !(norm <= self.cfg.shoot_tol) {
            return Err(Error::Convergence(format!(
                "matching defect {norm:.3e} exceeds tolerance {:.3e}",
                self.cfg.shoot_tol
            )));
        }
        let profile = self.assemble(q, log_a, m)?;
        Ok(ShootingResult {
            profile,
            slope_star: q,
            bracket_history: history,
            residual_sup: norm,
            matching_radius: r_m,
        })
    }

    fn assemble(&self, q: f64, log_a: f64, m: usize) -> Result<RadialProfile> {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        let mut values = vec![0.0; n];
        let mut derivs = vec![0.0; n];
        let eq = self.eq;
        let rhs = |t: f64, s: &[f64; 2]| eq.rhs(t, s);

        let y0 = self.initial(q);
        let mut y = [y0[0], y0[1]];
        let mut r = self.r_start();
        let mut ode = self.ode();
        match self.start {
            Start::Boundary(_) => {
                values[0] = 0.0;
                derivs[0] = q;
            }
            Start::Pole => {
                values[0] = q;
                derivs[0] = 0.0;
            }
        }
        for i in 1..=m {
            let (_, next) = ode.integrate(rhs, r, y, nodes[i], |_, _| Control::Continue)?;
            y = next;
            r = nodes[i];
            values[i] = y[0];
            derivs[i] = y[1];
        }
        let a = log_a.exp();
        let mut y = [a, -self.kappa * a];
        values[n - 1] = y[0];
        derivs[n - 1] = y[1];
        let mut r = nodes[n - 1];
        let mut ode = self.ode();
        for i in (m + 1..n - 1).rev() {
            let (_, next) = ode.integrate(rhs, r, y, nodes[i], |_, _| Control::Continue)?;
            y = next;
            r = nodes[i];
            values[i] = y[0];
            derivs[i] = y[1];
        }
        RadialProfile::new(
            self.grid.clone(),
            values,
            derivs,
            self.kappa,
            self.eq.drift as i32,
            self.eq.lambda,
        )
    }
}

fn check_inputs(params: &ModelParams, lambda: f64, cfg: &NumericsConfig) -> Result<()> {
    params.validate()?;
    cfg.validate()?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParams(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// Positive decaying solution of `λ(w'' + (N-1)coth(r)w') + w^p - w = 0`
/// on `(r0, ∞)` with `w(r0) = 0`.
pub fn solve_exterior_lambda(
    params: &ModelParams,
    r0: f64,
    lambda: f64,
    cfg: &NumericsConfig,
) -> Result<ShootingResult> {
    check_inputs(params, lambda, cfg)?;
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::InvalidParams(format!("inner radius must be positive, got {r0}")));
    }
    let kappa = tail_exponent(params, lambda, 0.0)?;
    let r_max = cfg.r_max_for(r0, kappa)?;
    let shooter = Shooter {
        eq: RadialEquation::new(params, lambda),
        start: Start::Boundary(r0),
        cfg,
        ceiling: cfg.ceiling(params),
        kappa,
        grid: RadialGrid::uniform(r0, r_max, cfg.grid_points - 1)?,
    };
    let result = shooter.solve(0.0, 1.0)?;
    check_positive(&result.profile)?;
    Ok(result)
}

/// The exterior ground state `w_R` of the unscaled problem on `(R, ∞)`.
pub fn solve_exterior_ground_state(
    params: &ModelParams,
    big_r: f64,
    cfg: &NumericsConfig,
) -> Result<ShootingResult> {
    solve_exterior_lambda(params, big_r, 1.0, cfg)
}

/// `u_λ` on `(1, ∞)`, solved directly in the `λ`-form.
pub fn solve_unit_ground_state(
    params: &ModelParams,
    lambda: f64,
    cfg: &NumericsConfig,
) -> Result<ShootingResult> {
    solve_exterior_lambda(params, 1.0, lambda, cfg)
}

/// Whole-space ground state `U` with `U'(0) = 0`, with the shooting data.
pub fn solve_whole_space_detailed(params: &ModelParams, cfg: &NumericsConfig) -> Result<ShootingResult> {
    check_inputs(params, 1.0, cfg)?;
    let kappa = tail_exponent(params, 1.0, 0.0)?;
    let r_max = cfg.r_max_for(0.0, kappa)?;
    let shooter = Shooter {
        eq: RadialEquation::new(params, 1.0),
        start: Start::Pole,
        cfg,
        ceiling: cfg.ceiling(params),
        kappa,
        grid: RadialGrid::uniform(0.0, r_max, cfg.grid_points - 1)?,
    };
    let result = shooter.solve(1.0, 2.0)?;
    if result.profile.values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Convergence("whole-space profile is not positive".into()));
    }
    Ok(result)
}

pub fn solve_whole_space_ground_state(params: &ModelParams, cfg: &NumericsConfig) -> Result<RadialProfile> {
    Ok(solve_whole_space_detailed(params, cfg)?.profile)
}

fn check_positive(profile: &RadialProfile) -> Result<()> {
    if profile.values[1..].iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Convergence(
            "converged profile is not positive in the interior".into(),
        ));
    }
    Ok(())
}
