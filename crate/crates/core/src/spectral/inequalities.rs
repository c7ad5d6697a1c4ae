//! The weighted boundary inequality and the symmetric trace inequality,
//! evaluated on explicit test functions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{g1_mu_bound, sphere_eigenvalue};
use crate::linalg::gauss_legendre;
use crate::model::RadialProfile;
use crate::spectral::ModeFunction;

/// Tolerance added to the right-hand sides before declaring a violation.
pub const INEQUALITY_TOL: f64 = 1e-8;

/// `g(s) = Σ a_k b((s - c_k)/w_k)` with the standard bump
/// `b(x) = exp(-1/(1-x²))` on `|x| < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSum {
    pub bumps: Vec<(f64, f64, f64)>,
}

impl BumpSum {
    pub fn new(bumps: Vec<(f64, f64, f64)>) -> Result<Self> {
        if bumps.iter().any(|&(_, w, _)| !(w > 0.0)) {
            return Err(Error::InvalidParams("bump widths must be positive".into()));
        }
        Ok(BumpSum { bumps })
    }

    pub fn zero() -> Self {
        BumpSum { bumps: Vec::new() }
    }

    /// A random sum of one to four bumps, at least one of which covers `r`.
    pub fn random<R: Rng>(rng: &mut R, r: f64) -> Self {
        let count = rng.random_range(1..=4);
        let mut bumps = Vec::with_capacity(count);
        for k in 0..count {
            let w = rng.random_range(0.05..2.0);
            let c = if k == 0 {
                r + rng.random_range(-0.9..0.9) * w
            } else {
                r + rng.random_range(-0.5..4.0)
            };
            bumps.push((c, w, rng.random_range(-2.0..2.0)));
        }
        BumpSum { bumps }
    }

    pub fn eval(&self, s: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for &(c, w, a) in &self.bumps {
            let x = (s - c) / w;
            if x.abs() < 1.0 {
                let q = 1.0 - x * x;
                let b = (-1.0 / q).exp();
                v += a * b;
                d += a * b * (-2.0 * x / (q * q)) / w;
            }
        }
        (v, d)
    }

    /// Sorted breakpoints (support edges) inside `[r, ∞)`, starting at `r`.
    fn breakpoints(&self, r: f64) -> Vec<f64> {
        let mut pts = vec![r];
        for &(c, w, _) in &self.bumps {
            pts.extend([c - w, c + w].into_iter().filter(|&x| x > r));
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        pts.dedup();
        pts
    }

    /// `∫_r^∞ f(s, g, g') ds` by composite Gauss–Legendre on the support.
    pub fn integrate(&self, r: f64, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let (gx, gw) = gauss_legendre(16);
        let pts = self.breakpoints(r);
        let mut total = 0.0;
        for seg in pts.windows(2) {
            let panels = ((seg[1] - seg[0]) * 200.0).ceil().max(1.0) as usize;
            let h = (seg[1] - seg[0]) / panels as f64;
            for k in 0..panels {
                let mid = seg[0] + (k as f64 + 0.5) * h;
                for (x, w) in gx.iter().zip(&gw) {
                    let s = mid + 0.5 * h * x;
                    let (v, d) = self.eval(s);
                    total += 0.5 * h * w * f(s, v, d);
                }
            }
        }
        total
    }
}

/// Both sides of
/// `S^{N-2}(r) g(r)² ≤ (1/λ)∫_r^∞ g'² S^{N-1} + (2 - N + λ)∫_r^∞ g² S^{N-3}`.
pub fn weighted_boundary_inequality_check(g: &BumpSum, n: usize, lambda_w: f64, r: f64) -> Result<(f64, f64)> {
    if n < 2 || !(lambda_w > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidParams("need N >= 2, lambda > 0 and r > 0".into()));
    }
    let m = n as i32 - 1;
    let lhs = r.sinh().powi(m - 1) * g.eval(r).0.powi(2);
    let grad = g.integrate(r, |s, _, d| d * d * s.sinh().powi(m));
    let mass = g.integrate(r, |s, v, _| v * v * s.sinh().powi(m - 2));
    let rhs = grad / lambda_w + (2.0 - n as f64 + lambda_w) * mass;
    if lhs > rhs + INEQUALITY_TOL {
        return Err(Error::lemma(
            "weighted-boundary",
            format!("lhs {lhs} exceeds rhs {rhs} at r = {r}"),
        ));
    }
    Ok((lhs, rhs))
}

/// `∫_{r0}^{∞} f(r, ψ, ψ')` over a profile by Gauss–Legendre on each grid
/// interval of the Hermite interpolant. The exponential tail is added with
/// `tail(r_max, ψ(r_max), κ)`.
pub fn profile_integral(profile: &RadialProfile, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let (gx, gw) = gauss_legendre(4);
    let nodes = profile.nodes();
    let mut total = 0.0;
    for seg in nodes.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        for (x, w) in gx.iter().zip(&gw) {
            let s = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let (v, d) = profile.eval_with_derivative(s);
            total += 0.5 * (b - a) * w * f(s, v, d);
        }
    }
    total
}

/// Both sides of the symmetric trace inequality in separated form:
/// `S^{N-2}(R) Σ|a_k|²ψ_k(R)² ≤ 3/(4(N-1)) Σ|a_k|² ∫(ψ_k'² S^{N-1} + μ_k ψ_k² S^{N-3})`.
///
/// The radial parts must start at `R` and vanish at their last node.
pub fn trace_inequality_check(modes: &[ModeFunction], n: usize, big_r: f64) -> Result<(f64, f64)> {
    if n < 2 || !(big_r > 0.0) {
        return Err(Error::InvalidParams("need N >= 2 and R > 0".into()));
    }
    let m = n as i32 - 1;
    let bound = g1_mu_bound(n);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for mode in modes {
        let mu = sphere_eigenvalue(mode.degree, n);
        if mu < bound {
            return Err(Error::Precondition(format!(
                "degree {} has mu = {mu} below {bound}",
                mode.degree
            )));
        }
        let prof = &mode.radial;
        if (prof.r0() - big_r).abs() > 1e-12 * big_r {
            return Err(Error::Incompatible(format!("mode starts at {} not R = {big_r}", prof.r0())));
        }
        if prof.values[prof.len() - 1] != 0.0 {
            return Err(Error::Precondition("radial part must vanish at its last node".into()));
        }
        let a2: f64 = mode.coefficients.iter().map(|c| c * c).sum();
        lhs += a2 * big_r.sinh().powi(m - 1) * prof.values[0].powi(2);
        rhs += a2 * profile_integral(prof, |s, v, d| d * d * s.sinh().powi(m) + mu * v * v * s.sinh().powi(m - 2));
    }
    rhs *= 0.75 / (n as f64 - 1.0);
    if lhs > rhs + INEQUALITY_TOL {
        return Err(Error::lemma("trace", format!("lhs {lhs} exceeds rhs {rhs}")));
    }
    Ok((lhs, rhs))
}
