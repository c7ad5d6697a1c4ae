//! Radial spectrum of the linearized operator
//! `L_λ = -λΔ + 1 - p u_λ^{p-1}` on `(1, ∞)`, the quadratic forms `Q_λ` and
//! `Q̃_λ` in separated coordinates, and the lower bound for `Λ₀`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::sphere_eigenvalue;
use crate::linalg::LaplacianPencil;
use crate::model::{coth, ModelParams, Warp, NumericsConfig, RadialGrid, RadialProfile};
use crate::radial::UnitProfileCache;

pub mod form;
pub mod inequalities;
pub mod trials;

pub use form::RadialForm;
pub use inequalities::{trace_inequality_check, weighted_boundary_inequality_check, BumpSum};
pub use trials::{constrained_trial_search, TrialSearch};

/// Eigenvalues closer than this to zero count as degenerate.
pub const ZERO_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub eigenvalue: f64,
    /// Normalized in the lumped weighted `L²` norm; positive for the ground pair.
    pub eigenfunction: RadialProfile,
}

/// A separated function `ψ(r) · Σ_j a_j ζ_j(θ)` with `ζ_j` orthonormal
/// degree-`i` harmonics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeFunction {
    pub radial: RadialProfile,
    pub degree: usize,
    pub coefficients: Vec<f64>,
}

impl ModeFunction {
    pub fn new(radial: RadialProfile, degree: usize, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParams("mode needs at least one coefficient".into()));
        }
        Ok(ModeFunction {
            radial,
            degree,
            coefficients,
        })
    }

    /// Single-coefficient mode.
    pub fn single(radial: RadialProfile, degree: usize) -> Self {
        ModeFunction {
            radial,
            degree,
            coefficients: vec![1.0],
        }
    }

    fn angular_norm_sq(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }
}

/// Closure exponent of the linearized tail for the eigenvalue `tau`. Above
/// `τ = 1` the decay formula is continued down to the bottom of the
/// continuous spectrum.
pub(crate) fn closure_exponent(params: &ModelParams, lambda: f64, tau: f64) -> f64 {
    let k = 1.0 / lambda.sqrt();
    let m = params.drift();
    0.5 * k * (m + (m * m + 4.0 * (1.0 - tau)).max(0.0).sqrt())
}

/// Grading exponent of the eigenproblem grid: nodes cluster near the inner
/// radius, where the ground state and its eigenfunctions vary on the scale
/// `√λ`.
pub const EIGEN_GRADING: f64 = 4.0;

fn eigen_grid(u: &RadialProfile, intervals: usize) -> Result<RadialGrid> {
    RadialGrid::graded(u.r0(), u.r_max(), intervals, EIGEN_GRADING)
}

/// The symmetric eigenproblem for degree-`mu` radial functions with Dirichlet
/// data at the inner radius, closed with the exponent for eigenvalue `tau`.
struct Spectrum<'a> {
    u: &'a RadialProfile,
    params: &'a ModelParams,
    grid: RadialGrid,
    mu: f64,
}

impl Spectrum<'_> {
    fn form(&self, tau: f64) -> Result<(RadialForm, LaplacianPencil)> {
        let kappa = closure_exponent(self.params, self.u.lambda, tau);
        let form = RadialForm::new(&self.grid, self.u, self.params, self.mu, kappa)?;
        let pencil = form.dirichlet_pencil()?;
        Ok((form, pencil))
    }

    /// `k`-th eigenvalue with the closure iterated to self-consistency.
    fn eigenvalue(&self, k: usize) -> Result<(f64, RadialForm, LaplacianPencil)> {
        let mut tau = self.form(0.0)?.1.eigenvalue(k, 1e-14);
        for _ in 0..50 {
            let (form, pencil) = self.form(tau)?;
            let next = pencil.eigenvalue(k, 1e-14);
            if (next - tau).abs() <= 1e-14 * (1.0 + tau.abs()) {
                return Ok((next, form, pencil));
            }
            tau = next;
        }
        Err(Error::Convergence("closure iteration for the eigenvalue did not settle".into()))
    }

    fn pair(&self, k: usize, quad_tol: f64) -> Result<EigenPair> {
        let (tau, form, pencil) = self.eigenvalue(k)?;
        let y = pencil.eigenvector(tau)?;
        let residual = pencil
            .apply_shifted(&y, tau)
            .iter()
            .zip(&pencil.mass)
            .map(|(r, m)| (r / m.sqrt()).abs())
            .fold(0.0, f64::max);
        if residual > quad_tol * (1.0 + tau.abs()) {
            return Err(Error::Convergence(format!("eigenvector residual {residual}")));
        }
        let mut z = vec![0.0];
        z.extend(y);
        let norm = form.mass_product(&z, &z, 0).sqrt();
        let sign = if z[1..].iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        z.iter_mut().for_each(|v| *v *= sign / norm);
        let dz = form.derivatives(&z);
        let profile = RadialProfile::new(
            self.grid.clone(),
            z,
            dz,
            form.kappa,
            form.weight_power,
            self.u.lambda,
        )?;
        Ok(EigenPair {
            eigenvalue: tau,
            eigenfunction: profile,
        })
    }
}

/// The `n_eigs` lowest eigenvalues of `L_λ` on radial functions vanishing
/// at the inner radius, on `cfg.eig_intervals` graded intervals.
///
/// Fails unless exactly one eigenvalue is negative and none lies within
/// `1e-8` of zero.
pub fn radial_spectrum(u: &RadialProfile, params: &ModelParams, n_eigs: usize, cfg: &NumericsConfig) -> Result<Vec<EigenPair>> {
    radial_spectrum_on(u, params, n_eigs, cfg, cfg.eig_intervals)
}

pub fn radial_spectrum_on(
    u: &RadialProfile,
    params: &ModelParams,
    n_eigs: usize,
    cfg: &NumericsConfig,
    intervals: usize,
) -> Result<Vec<EigenPair>> {
    if n_eigs == 0 {
        return Err(Error::InvalidParams("n_eigs must be positive".into()));
    }
    let spec = Spectrum {
        u,
        params,
        grid: eigen_grid(u, intervals)?,
        mu: 0.0,
    };
    morse_check(&spec.form(0.0)?.1)?;
    let pairs = (0..n_eigs).map(|k| spec.pair(k, cfg.quad_tol)).collect::<Result<Vec<_>>>()?;
    let negative = pairs.iter().filter(|p| p.eigenvalue < 0.0).count();
    if negative != 1 {
        return Err(Error::MorseIndex { negative });
    }
    let z = &pairs[0].eigenfunction.values;
    if z[1..z.len()].iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Consistency("ground eigenfunction changes sign".into()));
    }
    Ok(pairs)
}

/// Number of eigenvalues below `-1e-8` must be one and none may lie in
/// `[-1e-8, 1e-8]`.
fn morse_check(mat: &LaplacianPencil) -> Result<()> {
    let below = mat.count_below(-ZERO_GAP);
    if below != 1 {
        return Err(Error::MorseIndex { negative: below });
    }
    let near = mat.count_below(ZERO_GAP) - below;
    if near != 0 {
        return Err(Error::Consistency(format!("{near} eigenvalue(s) within {ZERO_GAP} of zero")));
    }
    Ok(())
}

/// Only the lowest eigenvalue `τ₀`, without eigenvectors.
pub fn ground_eigenvalue(u: &RadialProfile, params: &ModelParams, cfg: &NumericsConfig) -> Result<f64> {
    let spec = Spectrum {
        u,
        params,
        grid: eigen_grid(u, cfg.eig_intervals)?,
        mu: 0.0,
    };
    Ok(spec.eigenvalue(0)?.0)
}

/// Lowest eigenvalue of the degree-`mu` Dirichlet operator
/// `L_λ + λμ/S²`, closed at `τ = 0`.
pub fn dirichlet_mode_eigenvalue(u: &RadialProfile, params: &ModelParams, mu: f64, intervals: usize) -> Result<f64> {
    let grid = RadialGrid::uniform(u.r0(), u.r_max(), intervals)?;
    let kappa = closure_exponent(params, u.lambda, 0.0);
    let form = RadialForm::new(&grid, u, params, mu, kappa)?;
    Ok(form.dirichlet_pencil()?.eigenvalue(0, 1e-14))
}

fn mode_form(psi: &ModeFunction, u: &RadialProfile, params: &ModelParams) -> Result<RadialForm> {
    let mu = sphere_eigenvalue(psi.degree, params.n);
    RadialForm::new(&psi.radial.grid, u, params, mu, psi.radial.decay_exponent)
}

/// `Q_λ(ψ) = ∫S^{N-1}(λψ'² + (1 - pu^{p-1})ψ²) + λμ∫S^{N-3}ψ²` for a
/// mode vanishing at `r = 1`.
pub fn quadratic_form_q(psi: &ModeFunction, u: &RadialProfile, params: &ModelParams) -> Result<f64> {
    let v = &psi.radial.values;
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if v[0].abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!("mode has nonzero trace {}", v[0])));
    }
    quadratic_form_qtilde(psi, u, params)
}

/// `Q̃_λ(ψ) = Q_λ(ψ) - λ(N-1)(S_λ'/S_λ)(1) ∫_{∂B_1} ψ²`.
pub fn quadratic_form_qtilde(psi: &ModeFunction, u: &RadialProfile, params: &ModelParams) -> Result<f64> {
    let r0 = psi.radial.r0();
    if (r0 - 1.0).abs() > 1e-14 || (u.r0() - 1.0).abs() > 1e-14 {
        return Err(Error::Precondition("forms live on the exterior of the unit ball".into()));
    }
    let form = mode_form(psi, u, params)?;
    let v = &psi.radial.values;
    let boundary = boundary_coefficient(params, u.lambda) * v[0] * v[0];
    Ok((form.energy(v) - boundary) * psi.angular_norm_sq())
}

/// `λ(N-1)(S_λ'/S_λ)(1) S_λ^{N-1}(1)`: the factor multiplying `ψ(1)²` in
/// the boundary term of `Q̃_λ`. At `λ = 1` this is `(N-1)coth(1)sinh^{N-1}(1)`.
pub fn boundary_coefficient(params: &ModelParams, lambda: f64) -> f64 {
    let warp = Warp { k: 1.0 / lambda.sqrt() };
    lambda * params.drift() * warp.log_derivative(1.0) * warp.weight(1.0, params.weight_power())
}

/// `∫_1^∞ S^{N-1+shift} ψ²` with the same lumped weights as the forms.
pub fn weighted_mass(psi: &RadialProfile, params: &ModelParams, shift: i32) -> Result<f64> {
    let form = RadialForm::new(&psi.grid, psi, params, 0.0, psi.decay_exponent)?;
    Ok(form.mass_product(&psi.values, &psi.values, shift))
}

/// `-τ₀ sinh²(1) / μ_{i_1}`, the bound in the unit geometry `λ = 1`.
pub fn lambda0_lower_bound(tau0: f64, mu_i1: f64) -> Result<f64> {
    lambda0_lower_bound_at(tau0, mu_i1, 1.0)
}

/// `-τ₀ S_λ²(1) / μ_{i_1}`.
pub fn lambda0_lower_bound_at(tau0: f64, mu_i1: f64, lambda: f64) -> Result<f64> {
    let s = Warp::new(lambda)?.s(1.0);
    if !(tau0 < 0.0) {
        return Err(Error::Precondition(format!("tau0 must be negative, got {tau0}")));
    }
    if !(mu_i1 > 0.0) {
        return Err(Error::Precondition(format!("mu must be positive, got {mu_i1}")));
    }
    Ok(-tau0 * s * s / mu_i1)
}

/// The largest `λ` with `λ ≤ -τ₀(λ) S_λ²(1)/μ`, where `τ₀(λ)` is the ground
/// eigenvalue at `u_λ`. Every such `λ` is a lower bound for `Λ₀`.
pub fn lambda0_self_consistent_bound(cache: &UnitProfileCache, mu_i1: f64) -> Result<f64> {
    let params = *cache.params();
    let cfg = cache.config().clone();
    let gap = |lam: f64| -> Result<f64> {
        let u = cache.get(lam)?;
        let tau = ground_eigenvalue(&u.profile, &params, &cfg)?;
        Ok(lam - lambda0_lower_bound_at(tau, mu_i1, lam)?)
    };
    // g(λ) = λ - bound(λ) is negative for small λ and positive beyond the bound.
    let mut hi = lambda0_lower_bound(ground_eigenvalue(&cache.get(1.0)?.profile, &params, &cfg)?, mu_i1)?;
    let mut g_hi = gap(hi)?;
    let mut lo = hi;
    let mut g_lo = g_hi;
    let mut tries = 0;
    while g_hi <= 0.0 {
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        g_hi = gap(hi)?;
        tries += 1;
        if tries > 40 {
            return Err(Error::NotFound("bound for Lambda0 did not bracket".into()));
        }
    }
    while g_lo > 0.0 {
        hi = lo;
        g_hi = g_lo;
        lo *= 0.5;
        g_lo = gap(lo)?;
        tries += 1;
        if tries > 40 {
            return Err(Error::NotFound("bound for Lambda0 did not bracket".into()));
        }
    }
    // Illinois regula falsi, then bisection safeguards.
    let mut side = 0i8;
    for _ in 0..100 {
        if hi - lo <= 1e-10 * hi {
            break;
        }
        let mut x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let gx = gap(x)?;
        if gx <= 0.0 {
            lo = x;
            g_lo = gx;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            g_hi = gx;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(lo)
}

/// `3(e²+1)/(4(e²-1)) = (3/4) coth(1)`.
pub fn trace_constant() -> f64 {
    0.75 * coth(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda0_bound_arithmetic() {
        let b = lambda0_lower_bound(-1.0, 6.0).unwrap();
        assert!((b - 0.230183).abs() < 1e-6);
        assert!(lambda0_lower_bound(0.5, 6.0).is_err());
        assert!(lambda0_lower_bound(-0.5, 0.0).is_err());
    }

    #[test]
    fn trace_constant_is_below_one() {
        let e2 = 1f64.exp().powi(2);
        let c = 3.0 * (e2 + 1.0) / (4.0 * (e2 - 1.0));
        assert!((trace_constant() - c).abs() < 1e-15);
        assert!((c - 0.9848).abs() < 1e-4);
        assert!(c < 1.0);
    }
}
