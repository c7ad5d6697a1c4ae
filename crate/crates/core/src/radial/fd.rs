//! Finite-difference Newton solver for the ground-state boundary-value
//! problem, used as an independent check on the shooting solver.

use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::model::{tail_exponent, Warp, ModelParams, NumericsConfig, RadialGrid, RadialProfile};
use crate::radial::equation::RadialEquation;

const MAX_NEWTON: usize = 100;

/// Where the grid starts: a Dirichlet boundary or the regular pole `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerCondition {
    Dirichlet(f64),
    Pole,
}

/// Discrete problem on a uniform grid with a Robin ghost node at `r_max`.
#[derive(Debug, Clone)]
pub struct FdProblem {
    eq: RadialEquation,
    inner: InnerCondition,
    grid: RadialGrid,
    h: f64,
    kappa: f64,
}

impl FdProblem {
    pub fn new(params: &ModelParams, inner: InnerCondition, lambda: f64, cfg: &NumericsConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let r0 = match inner {
            InnerCondition::Dirichlet(r0) if r0 > 0.0 => r0,
            InnerCondition::Dirichlet(r0) => {
                return Err(Error::InvalidParams(format!("inner radius must be positive, got {r0}")))
            }
            InnerCondition::Pole => 0.0,
        };
        let kappa = tail_exponent(params, lambda, 0.0)?;
        let r_max = cfg.r_max_for(r0, kappa)?;
        let n = ((r_max - r0) / cfg.fd_step).ceil().max(64.0) as usize;
        let grid = RadialGrid::uniform(r0, r_max, n)?;
        Ok(FdProblem {
            eq: RadialEquation::new(params, lambda),
            inner,
            h: (r_max - r0) / n as f64,
            grid,
            kappa,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn first_unknown(&self) -> usize {
        match self.inner {
            InnerCondition::Dirichlet(_) => 1,
            InnerCondition::Pole => 0,
        }
    }

    /// Residual and tridiagonal Jacobian (sub, diag, sup) over the unknowns.
    #[allow(clippy::type_complexity)]
    fn system(&self, w: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let nodes = self.grid.nodes();
        let n = nodes.len() - 1;
        let first = self.first_unknown();
        let m = n + 1 - first;
        let lam = self.eq.lambda;
        let h2 = self.h * self.h;
        let mut res = vec![0.0; m];
        let mut sub = vec![0.0; m - 1];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m - 1];
        for i in first..=n {
            let k = i - first;
            let wi = w[i];
            let f = self.eq.nonlinearity(wi);
            let df = self.eq.nonlinearity_derivative(wi);
            if i == 0 {
                // regular pole: (N-1)coth(r)w' -> (N-1)w'', ghost w_{-1} = w_1
                let c = lam * (self.eq.drift + 1.0) * 2.0 / h2;
                res[k] = c * (w[1] - wi) + f;
                diag[k] = -c + df;
                sup[k] = c;
                continue;
            }
            let c = self.eq.drift_coefficient(nodes[i]);
            let a_lo = lam * (1.0 / h2 - c / (2.0 * self.h));
            let a_hi = lam * (1.0 / h2 + c / (2.0 * self.h));
            let a_mid = -2.0 * lam / h2;
            if i < n {
                res[k] = a_lo * w[i - 1] + a_mid * wi + a_hi * w[i + 1] + f;
                if k > 0 {
                    sub[k - 1] = a_lo;
                }
                sup[k] = a_hi;
            } else {
                // ghost node from the Robin closure w' = -κw
                let ghost = -2.0 * self.h * self.kappa;
                res[k] = (a_lo + a_hi) * w[i - 1] + (a_mid + a_hi * ghost) * wi + f;
                sub[k - 1] = a_lo + a_hi;
                diag[k] = a_mid + a_hi * ghost + df;
                continue;
            }
            diag[k] = a_mid + df;
        }
        (res, sub, diag, sup)
    }

    /// Damped Newton iteration from `initial` (node values; the Dirichlet
    /// value is overwritten with zero).
    pub fn solve_from(&self, initial: &[f64]) -> Result<RadialProfile> {
        let nodes = self.grid.nodes();
        if initial.len() != nodes.len() {
            return Err(Error::Incompatible("initial guess does not match the grid".into()));
        }
        let first = self.first_unknown();
        let mut w = initial.to_vec();
        if first == 1 {
            w[0] = 0.0;
        }
        let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let solve = |sys: &(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>), res: &[f64]| {
            let rhs: Vec<f64> = res.iter().map(|v| -v).collect();
            solve_tridiagonal(&sys.1, &sys.2, &sys.3, &rhs)
                .map_err(|e| Error::OracleFailure(format!("Newton linear solve failed: {e}")))
        };
        let shifted = |w: &[f64], delta: &[f64], t: f64| -> Vec<f64> {
            w.iter()
                .enumerate()
                .map(|(i, &v)| if i < first { v } else { v + t * delta[i - first] })
                .collect()
        };
        // Damping by the natural monotonicity test: the simplified Newton
        // correction at the trial point must shrink.
        let mut sys = self.system(&w);
        let mut converged = false;
        let mut dnorm = f64::INFINITY;
        for _ in 0..MAX_NEWTON {
            let delta = solve(&sys, &sys.0)?;
            dnorm = norm(&delta);
            let wnorm = norm(&w);
            if dnorm <= 1e-12 * wnorm.max(1e-300) {
                w = shifted(&w, &delta, 1.0);
                converged = true;
                break;
            }
            let mut t: f64 = 1.0;
            let mut accepted = false;
            while t >= 1e-4 {
                let trial = shifted(&w, &delta, t);
                let trial_sys = self.system(&trial);
                let simplified = solve(&sys, &trial_sys.0)?;
                if norm(&simplified) <= (1.0 - t / 4.0) * dnorm {
                    w = trial;
                    sys = trial_sys;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                // rounding floor: no further contraction possible
                converged = dnorm <= 1e-9 * wnorm.max(1e-300);
                break;
            }
        }
        if !converged {
            return Err(Error::OracleFailure(format!(
                "Newton iteration stagnated with correction {dnorm:.3e}"
            )));
        }
        let peak = norm(&w);
        if !(peak > 1e-6) {
            return Err(Error::OracleFailure(
                "Newton iteration converged to the trivial solution".into(),
            ));
        }
        if w[first..].iter().any(|&v| !(v > 0.0)) {
            return Err(Error::OracleFailure("Newton iteration converged to a sign-changing state".into()));
        }
        let derivs = self.derivatives(&w);
        RadialProfile::new(
            self.grid.clone(),
            w,
            derivs,
            self.kappa,
            self.eq.drift as i32,
            self.eq.lambda,
        )
    }

    fn derivatives(&self, w: &[f64]) -> Vec<f64> {
        let n = w.len() - 1;
        let h = self.h;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    match self.inner {
                        InnerCondition::Pole => 0.0,
                        InnerCondition::Dirichlet(_) => (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h),
                    }
                } else if i == n {
                    -self.kappa * w[n]
                } else {
                    (w[i + 1] - w[i - 1]) / (2.0 * h)
                }
            })
            .collect()
    }

    /// A positive bump of height `amp`: the one-dimensional soliton shape,
    /// cut off smoothly at a Dirichlet boundary.
    pub fn bump_guess(&self, amp: f64) -> Vec<f64> {
        let p = self.eq.p;
        let width = self.eq.lambda.sqrt();
        let (r0, center, cut) = match self.inner {
            InnerCondition::Dirichlet(r0) => (r0, r0 + 2.0 * width, true),
            InnerCondition::Pole => (0.0, 0.0, false),
        };
        self.grid
            .nodes()
            .iter()
            .map(|&r| {
                let x = (p - 1.0) * (r - center) / (2.0 * width);
                let s = (1.0 / x.cosh()).powf(2.0 / (p - 1.0));
                let c = if cut { ((r - r0) / width).tanh() } else { 1.0 };
                amp * s * c
            })
            .collect()
    }

    /// Tridiagonal matrix of `w ↦ -λ(w'' + (N-1)coth(r)w') + w` over the
    /// unknowns, with the same boundary closures as the nonlinear system.
    fn linear_part(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.grid.len();
        let zero = vec![0.0; n];
        // the Jacobian at w = 0 is A - I, where A is the discrete operator
        let (_, sub, diag, sup) = self.system(&zero);
        (
            sub.iter().map(|v| -v).collect(),
            diag.iter().map(|v| -v).collect(),
            sup.iter().map(|v| -v).collect(),
        )
    }

    /// Petviashvili iteration `w ← M^{p/(p-1)} L⁻¹(w₊^p)` with the
    /// stabilizing factor `M = ⟨w, Lw⟩ / ⟨w, w₊^p⟩`. It converges to the
    /// ground state from a broad range of positive bumps and supplies the
    /// starting point for Newton.
    pub fn petviashvili(&self, initial: &[f64], max_iter: usize, tol: f64) -> Result<Vec<f64>> {
        let first = self.first_unknown();
        let nodes = self.grid.nodes();
        let (sub, diag, sup) = self.linear_part();
        let warp = Warp::new(self.eq.lambda)?;
        let weight: Vec<f64> = nodes[first..]
            .iter()
            .map(|&r| if r == 0.0 { 0.0 } else { warp.s(r).powf(self.eq.drift) })
            .collect();
        let gamma = self.eq.p / (self.eq.p - 1.0);
        let mut w: Vec<f64> = initial[first..].to_vec();
        for _ in 0..max_iter {
            let nl: Vec<f64> = w.iter().map(|&v| v.max(0.0).powf(self.eq.p)).collect();
            let lw = tridiagonal_matvec(&sub, &diag, &sup, &w);
            let num: f64 = w.iter().zip(&lw).zip(&weight).map(|((a, b), c)| a * b * c).sum();
            let den: f64 = w.iter().zip(&nl).zip(&weight).map(|((a, b), c)| a * b * c).sum();
            if !(den > 0.0) || !(num > 0.0) {
                return Err(Error::OracleFailure(
                    "fixed-point iteration lost positivity".into(),
                ));
            }
            let v = solve_tridiagonal(&sub, &diag, &sup, &nl)?;
            let factor = (num / den).powf(gamma);
            let next: Vec<f64> = v.iter().map(|x| factor * x).collect();
            let change = next.iter().zip(&w).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let size = next.iter().fold(0.0f64, |m, a| m.max(a.abs()));
            w = next;
            if change <= tol * size {
                break;
            }
        }
        let mut full = initial.to_vec();
        full[first..].copy_from_slice(&w);
        Ok(full)
    }
}

fn tridiagonal_matvec(sub: &[f64], diag: &[f64], sup: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut v = diag[i] * x[i];
            if i > 0 {
                v += sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += sup[i] * x[i + 1];
            }
            v
        })
        .collect()
}

fn solve_from_bump(problem: &FdProblem) -> Result<RadialProfile> {
    let start = problem.petviashvili(&problem.bump_guess(1.0), 500, 1e-8)?;
    problem.solve_from(&start)
}

/// Solve at step `h` and `h/2` and combine the two second-order solutions
/// on the coarse nodes, removing the leading `h²` error term.
fn richardson(params: &ModelParams, inner: InnerCondition, lambda: f64, cfg: &NumericsConfig) -> Result<RadialProfile> {
    let coarse = FdProblem::new(params, inner, lambda, cfg)?;
    let n = coarse.grid.len() - 1;
    let fine_cfg = NumericsConfig {
        fd_step: (coarse.grid.r_max() - coarse.grid.r0()) / (2 * n) as f64,
        ..cfg.clone()
    };
    let fine = FdProblem::new(params, inner, lambda, &fine_cfg)?;
    if fine.grid.len() != 2 * n + 1 {
        return Err(Error::OracleFailure("refined grid is not nested".into()));
    }
    let wc = solve_from_bump(&coarse)?;
    let wf = solve_from_bump(&fine)?;
    let combine = |c: &[f64], f: &[f64]| -> Vec<f64> {
        (0..=n).map(|i| (4.0 * f[2 * i] - c[i]) / 3.0).collect()
    };
    let values = combine(&wc.values, &wf.values);
    let derivs = combine(&wc.derivatives, &wf.derivatives);
    RadialProfile::new(wc.grid.clone(), values, derivs, wc.decay_exponent, wc.weight_power, lambda)
}

/// Finite-difference solution of the exterior problem on `(r0, ∞)` in the
/// `λ`-form, started from a positive bump and Richardson-extrapolated.
pub fn fd_bvp_oracle_lambda(
    params: &ModelParams,
    r0: f64,
    lambda: f64,
    cfg: &NumericsConfig,
) -> Result<RadialProfile> {
    richardson(params, InnerCondition::Dirichlet(r0), lambda, cfg)
}

/// Finite-difference solution for `w_R`.
pub fn fd_bvp_oracle(params: &ModelParams, big_r: f64, cfg: &NumericsConfig) -> Result<RadialProfile> {
    fd_bvp_oracle_lambda(params, big_r, 1.0, cfg)
}

/// Finite-difference solution for the whole-space ground state `U`.
pub fn fd_whole_space_oracle(params: &ModelParams, cfg: &NumericsConfig) -> Result<RadialProfile> {
    richardson(params, InnerCondition::Pole, 1.0, cfg)
}
