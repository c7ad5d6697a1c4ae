//! The boundary operator `H_λ`: for boundary data `v` of mean zero, solve the
//! linearized equation outside the unit ball with trace `v`, and return
//! `-∂_r ψ_v - (N-1)(S_λ'/S_λ)(1) v` on the sphere. On the invariant harmonics of
//! degree `i_k` it acts as multiplication by `σ_{i_k}(λ)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{invariant_basis, sphere_eigenvalue, sphere_quadrature, GroupSpectrum, InvariantHarmonic, SymmetryGroup};
use crate::linalg::{solve_laplacian_plus_diagonal, solve_tridiagonal};
use crate::model::{tail_exponent, Warp, weighted_l2_inner, ModelParams, NumericsConfig, RadialGrid, RadialProfile};
use crate::radial::UnitProfileCache;
use crate::spectral::form::one_sided_derivative;
use crate::spectral::{lambda0_self_consistent_bound, ModeFunction, RadialForm, ZERO_GAP};

pub mod variational;

pub use variational::sigma_variational;

/// `(N-1) S_λ'(1)/S_λ(1) = (N-1) k coth(k)`, `k = 1/√λ`; `(N-1)coth(1)` at `λ = 1`.
pub fn boundary_constant(params: &ModelParams, lambda: f64) -> f64 {
    params.drift() * Warp { k: 1.0 / lambda.sqrt() }.log_derivative(1.0)
}

/// Grading of the mode grid toward the sphere, where `c` varies on the
/// scale `1/√μ`.
pub const MODE_GRADING: f64 = 4.0;

fn mode_form(degree: usize, u: &RadialProfile, params: &ModelParams, intervals: usize) -> Result<RadialForm> {
    if (u.r0() - 1.0).abs() > 1e-14 {
        return Err(Error::Precondition("mode problems live outside the unit ball".into()));
    }
    let grid = RadialGrid::graded(1.0, u.r_max(), intervals, MODE_GRADING)?;
    let kappa = tail_exponent(params, u.lambda, 0.0)?;
    RadialForm::new(&grid, u, params, sphere_eigenvalue(degree, params.n), kappa)
}

/// Solve
/// `-λ(c'' + (N-1)(S'/S) c') + (λμ/S² + 1 - p u^{p-1}) c = 0`, `c(1) = 1`,
/// with the decaying Robin closure at `r_max`.
pub fn solve_mode_ode(degree: usize, u: &RadialProfile, params: &ModelParams, cfg: &NumericsConfig) -> Result<RadialProfile> {
    solve_mode_ode_on(degree, u, params, cfg.mode_intervals)
}

pub fn solve_mode_ode_on(degree: usize, u: &RadialProfile, params: &ModelParams, intervals: usize) -> Result<RadialProfile> {
    let form = mode_form(degree, u, params, intervals)?;
    let pencil = form.dirichlet_pencil()?;
    let near = pencil.count_below(ZERO_GAP) - pencil.count_below(-ZERO_GAP);
    if near > 0 {
        return Err(Error::Degenerate(format!(
            "degree {degree} Dirichlet problem has an eigenvalue within {ZERO_GAP} of zero at lambda = {}",
            u.lambda
        )));
    }
    let n = form.len();
    let sol = if pencil.count_below(0.0) == 0 {
        // Positive definite: eliminate without forming the diagonal.
        let mut rhs = vec![0.0; n - 1];
        rhs[0] = pencil.left0;
        solve_laplacian_plus_diagonal(pencil.left0, &pencil.edges, &pencil.q, &rhs)?
    } else {
        let mut sub = Vec::with_capacity(n - 2);
        let mut diag = Vec::with_capacity(n - 1);
        let mut sup = Vec::with_capacity(n - 2);
        for i in 1..n {
            let (a, d, c) = form.row(i);
            if i > 1 {
                sub.push(a);
            }
            diag.push(d);
            if i + 1 < n {
                sup.push(c);
            }
        }
        let mut rhs = vec![0.0; n - 1];
        rhs[0] = form.edge[0];
        solve_tridiagonal(&sub, &diag, &sup, &rhs)?
    };
    let mut values = Vec::with_capacity(n);
    values.push(1.0);
    values.extend(sol);
    let derivatives = form.derivatives(&values);
    let grid = RadialGrid::new(form.nodes.clone())?;
    RadialProfile::new(grid, values, derivatives, form.kappa, params.weight_power(), u.lambda)
}

/// `σ_{i}(λ) = -(c_i'(1) + (N-1)(S_λ'/S_λ)(1))` with a second-order one-sided
/// derivative at the boundary.
pub fn sigma_eigenvalue(degree: usize, u: &RadialProfile, params: &ModelParams, cfg: &NumericsConfig) -> Result<f64> {
    let c = solve_mode_ode(degree, u, params, cfg)?;
    Ok(sigma_from_mode(&c, params))
}

pub fn sigma_from_mode(c: &RadialProfile, params: &ModelParams) -> f64 {
    -(one_sided_derivative(c.nodes(), &c.values) + boundary_constant(params, c.lambda))
}

/// Mean-zero boundary data in the invariant harmonics of `group`:
/// `v = Σ_k Σ_j a_{kj} ζ_{kj}` with `ζ_{kj}` orthonormal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFunction {
    pub group: SymmetryGroup,
    pub modes: Vec<(usize, Vec<f64>)>,
}

impl BoundaryFunction {
    pub fn new(group: SymmetryGroup, spectrum: &GroupSpectrum, modes: Vec<(usize, Vec<f64>)>) -> Result<Self> {
        if spectrum.group != group {
            return Err(Error::Incompatible("spectrum belongs to another group".into()));
        }
        for (degree, coeffs) in &modes {
            let entry = spectrum
                .entry(*degree)
                .ok_or_else(|| Error::InvalidParams(format!("degree {degree} is not in the group spectrum")))?;
            if coeffs.len() != entry.m {
                return Err(Error::InvalidParams(format!(
                    "degree {degree} needs {} coefficients, got {}",
                    entry.m,
                    coeffs.len()
                )));
            }
        }
        Ok(BoundaryFunction { group, modes })
    }

    /// `L²(S^{N-1})` inner product.
    pub fn inner(&self, other: &BoundaryFunction) -> f64 {
        let mut total = 0.0;
        for (d, a) in &self.modes {
            for (e, b) in &other.modes {
                if d == e {
                    total += a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                }
            }
        }
        total
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: f64, other: &BoundaryFunction, beta: f64) -> Result<BoundaryFunction> {
        if self.group != other.group {
            return Err(Error::Incompatible("boundary data for different groups".into()));
        }
        let mut modes: Vec<(usize, Vec<f64>)> = self
            .modes
            .iter()
            .map(|(d, a)| (*d, a.iter().map(|x| alpha * x).collect()))
            .collect();
        for (d, b) in &other.modes {
            match modes.iter_mut().find(|(e, _)| e == d) {
                Some((_, a)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += beta * y),
                None => modes.push((*d, b.iter().map(|y| beta * y).collect())),
            }
        }
        modes.sort_by_key(|(d, _)| *d);
        Ok(BoundaryFunction { group: self.group, modes })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.modes.iter().map(|(d, _)| *d).collect()
    }

    /// Basis functions for every degree present.
    pub fn basis(&self) -> Result<Vec<Vec<InvariantHarmonic>>> {
        self.modes.iter().map(|(d, _)| invariant_basis(&self.group, *d)).collect()
    }
}

/// `σ` for every degree in `v`, one mode solve per degree.
fn multipliers(v: &BoundaryFunction, u: &RadialProfile, params: &ModelParams, cfg: &NumericsConfig) -> Result<Vec<f64>> {
    v.modes
        .par_iter()
        .map(|(d, _)| sigma_eigenvalue(*d, u, params, cfg))
        .collect()
}

/// `H_λ v`, computed mode by mode.
pub fn apply_h(v: &BoundaryFunction, u: &RadialProfile, params: &ModelParams, cfg: &NumericsConfig) -> Result<BoundaryFunction> {
    let sig = multipliers(v, u, params, cfg)?;
    Ok(BoundaryFunction {
        group: v.group,
        modes: v
            .modes
            .iter()
            .zip(sig)
            .map(|((d, a), s)| (*d, a.iter().map(|x| s * x).collect()))
            .collect(),
    })
}

/// `ψ_v = Σ_k c_{i_k}(r) Σ_j a_{kj} ζ_{kj}(θ)`, after checking that `v` has
/// mean zero and that `ψ_v` is orthogonal to the radial ground state `z`.
pub fn dirichlet_extension(
    v: &BoundaryFunction,
    u: &RadialProfile,
    z: &RadialProfile,
    params: &ModelParams,
    cfg: &NumericsConfig,
) -> Result<Vec<ModeFunction>> {
    let modes = v
        .modes
        .par_iter()
        .map(|(d, a)| {
            let c = solve_mode_ode(*d, u, params, cfg)?;
            ModeFunction::new(c, *d, a.clone())
        })
        .collect::<Result<Vec<_>>>()?;

    // Angular means of each degree block, by exact quadrature.
    let basis = v.basis()?;
    let max_degree = v.degrees().into_iter().max().unwrap_or(0);
    let quad = sphere_quadrature(v.group.ambient_n, max_degree.max(1))?;
    let mut mean_sq = 0.0;
    let mut orth = 0.0;
    for ((_, a), (fns, mode)) in v.modes.iter().zip(basis.iter().zip(&modes)) {
        let mean = quad.integrate(|x| fns.iter().zip(a).map(|(f, c)| c * f.eval(x)).sum());
        mean_sq += mean * mean;
        let radial = weighted_l2_inner(&mode.radial, &z.resample(mode.radial.grid.clone()))?;
        orth += radial * mean;
    }
    if mean_sq.sqrt() > cfg.quad_tol || orth.abs() > cfg.quad_tol {
        return Err(Error::Consistency(format!(
            "extension side conditions fail: boundary mean {}, overlap with z {orth}",
            mean_sq.sqrt()
        )));
    }
    Ok(modes)
}

/// `σ_{i}` sampled over a `λ` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaCurve {
    pub degree: usize,
    pub samples: Vec<(f64, f64)>,
}

impl SigmaCurve {
    /// Adjacent sample pairs where `σ` changes sign.
    pub fn brackets(&self) -> Vec<((f64, f64), (f64, f64))> {
        self.samples
            .windows(2)
            .filter(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0))
            .map(|w| (w[0], w[1]))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,sigma,degree\n");
        for (l, s) in &self.samples {
            out.push_str(&format!("{l:.17e},{s:.17e},{}\n", self.degree));
        }
        out
    }
}

/// `σ_{degree}` at every grid point; the points are solved in parallel and
/// share the ground states in `cache`.
pub fn sigma_curve(degree: usize, lambda_grid: &[f64], cache: &UnitProfileCache) -> Result<SigmaCurve> {
    if lambda_grid.is_empty() {
        return Err(Error::InvalidParams("empty lambda grid".into()));
    }
    if lambda_grid.windows(2).any(|w| !(w[1] > w[0])) || !(lambda_grid[0] > 0.0) {
        return Err(Error::InvalidParams("lambda grid must be positive and strictly increasing".into()));
    }
    let params = *cache.params();
    let cfg = cache.config().clone();
    let samples = lambda_grid
        .par_iter()
        .map(|&lam| {
            let u = cache.get(lam)?;
            Ok((lam, sigma_eigenvalue(degree, &u.profile, &params, &cfg)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SigmaCurve { degree, samples })
}

/// Lowest eigenvalue of the degree-`degree` Dirichlet mode problem at `λ`.
pub fn dirichlet_mode_gap(degree: usize, lambda: f64, cache: &UnitProfileCache) -> Result<f64> {
    let u = cache.get(lambda)?;
    let params = *cache.params();
    let form = mode_form(degree, &u.profile, &params, cache.config().mode_intervals)?;
    Ok(form.dirichlet_pencil()?.eigenvalue(0, 1e-14))
}

/// The largest `λ ≤ lambda_max` where the degree-`degree` Dirichlet mode
/// problem is singular (a pole of `σ`), found by scanning upward from
/// `lambda_start` and refining the last sign change.
pub fn dirichlet_pole(degree: usize, lambda_start: f64, lambda_max: f64, cache: &UnitProfileCache) -> Result<f64> {
    if !(lambda_start > 0.0 && lambda_max > lambda_start) {
        return Err(Error::InvalidParams("need 0 < lambda_start < lambda_max".into()));
    }
    let mut grid = vec![lambda_start];
    while *grid.last().unwrap() < lambda_max {
        let next = (grid.last().unwrap() * 1.1).min(lambda_max);
        grid.push(next);
    }
    let gaps = grid
        .par_iter()
        .map(|&l| dirichlet_mode_gap(degree, l, cache))
        .collect::<Result<Vec<_>>>()?;
    let idx = (0..grid.len() - 1)
        .rev()
        .find(|&j| gaps[j] <= 0.0 && gaps[j + 1] > 0.0)
        .ok_or_else(|| Error::NotFound(format!("no Dirichlet pole for degree {degree} in [{lambda_start}, {lambda_max}]")))?;
    let (mut lo, mut hi) = (grid[idx], grid[idx + 1]);
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if dirichlet_mode_gap(degree, mid, cache)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Relative offset of the extra grid point placed just above the last
/// Dirichlet pole, where `σ` is large and negative.
pub const POLE_OFFSET: f64 = 1e-4;

/// Default `λ` grid for `σ_{i_1}`: `points` log-spaced values from 1.05
/// times the self-consistent `Λ₀` bound up to `lambda_max`, together with
/// one point just above the last Dirichlet pole of degree `i_1` below
/// `lambda_max`. `σ` jumps from `+∞` to `-∞` across the pole and its last
/// zero can sit closer to the pole than the log spacing.
pub fn default_lambda_grid(cache: &UnitProfileCache, spectrum: &GroupSpectrum, lambda_max: f64, points: usize) -> Result<Vec<f64>> {
    let first = spectrum
        .first()
        .ok_or_else(|| Error::Precondition("group spectrum is empty".into()))?;
    lambda_grid_for(first.i, cache, spectrum, lambda_max, points)
}

/// As [`default_lambda_grid`], with the extra point placed above the last
/// Dirichlet pole of `degree` instead of `i_1`.
pub fn lambda_grid_for(degree: usize, cache: &UnitProfileCache, spectrum: &GroupSpectrum, lambda_max: f64, points: usize) -> Result<Vec<f64>> {
    let first = spectrum
        .first()
        .ok_or_else(|| Error::Precondition("group spectrum is empty".into()))?;
    if points < 2 {
        return Err(Error::InvalidParams("need at least two grid points".into()));
    }
    let bound = lambda0_self_consistent_bound(cache, first.mu)?;
    lambda_grid_from(degree, 1.05 * bound, lambda_max, points, cache)
}

/// `points` log-spaced values on `[start, lambda_max]` plus the point just
/// above the last Dirichlet pole of `degree` in that range.
pub fn lambda_grid_from(degree: usize, start: f64, lambda_max: f64, points: usize, cache: &UnitProfileCache) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidParams("need at least two grid points".into()));
    }
    if !(start > 0.0 && start < lambda_max) {
        return Err(Error::InvalidParams(format!("grid start {start} is not below {lambda_max}")));
    }
    let mut grid = log_grid(start, lambda_max, points);
    match dirichlet_pole(degree, start, lambda_max, cache) {
        Ok(pole) => {
            let extra = pole * (1.0 + POLE_OFFSET);
            if extra < lambda_max {
                grid.push(extra);
                grid.sort_by(f64::total_cmp);
                grid.dedup();
            }
        }
        Err(Error::NotFound(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(grid)
}

pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|k| {
            if k + 1 == n {
                b
            } else {
                (la + (lb - la) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
