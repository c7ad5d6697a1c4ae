//! Problem parameters, hyperbolic metric factors, radial grids and sampled
//! radial profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension `N` and exponent `p` of `-Δu + u = u^p` on hyperbolic space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
}

impl ModelParams {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        let params = ModelParams { n, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!(
                "dimension N must be at least 2, got {}",
                self.n
            )));
        }
        if !self.p.is_finite() || self.p <= 1.0 {
            return Err(Error::InvalidParams(format!(
                "exponent p must satisfy p > 1, got {}",
                self.p
            )));
        }
        if let Some(crit) = self.critical_exponent() {
            if self.p >= crit {
                return Err(Error::InvalidParams(format!(
                    "exponent p = {} is not subcritical for N = {} (need p < {})",
                    self.p, self.n, crit
                )));
            }
        }
        Ok(())
    }

    /// Sobolev exponent `(N+2)/(N-2)`, `None` in dimension two.
    pub fn critical_exponent(&self) -> Option<f64> {
        (self.n > 2).then(|| (self.n as f64 + 2.0) / (self.n as f64 - 2.0))
    }

    /// `N - 1`, the power of `sinh` in the volume element.
    pub fn weight_power(&self) -> i32 {
        self.n as i32 - 1
    }

    pub fn drift(&self) -> f64 {
        self.n as f64 - 1.0
    }

    /// Lower bound `((p+1)/2)^{1/(p-1)}` on the maximum of any ground state.
    pub fn peak_lower_bound(&self) -> f64 {
        ((self.p + 1.0) / 2.0).powf(1.0 / (self.p - 1.0))
    }
}

/// `(sinh r, cosh r, coth r)`.
pub fn metric_factors(r: f64) -> Result<(f64, f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("metric factors need r > 0, got {r}")));
    }
    let s = r.sinh();
    let c = r.cosh();
    Ok((s, c, c / s))
}

/// `coth r` for `r > 0` without the error plumbing; callers guarantee `r > 0`.
#[inline]
pub(crate) fn coth(r: f64) -> f64 {
    if r > 20.0 {
        1.0 + 2.0 * (-2.0 * r).exp()
    } else {
        1.0 / r.tanh()
    }
}

/// Radial geometry of the unit-ball picture at parameter `λ`: hyperbolic
/// space of curvature `-1/λ`, with warping function
/// `S_λ(r) = √λ sinh(r/√λ)`. Rescaling `H^N` by `1/R` maps `B_R^c` onto the
/// exterior of the unit ball in this space, with `λ = 1/R²`. At `λ = 1` this
/// is `sinh`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Warp {
    /// `1/√λ`.
    pub k: f64,
}

impl Warp {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Warp { k: 1.0 / lambda.sqrt() })
    }

    /// `S_λ(r)`.
    #[inline]
    pub fn s(&self, r: f64) -> f64 {
        if self.k == 1.0 {
            r.sinh()
        } else {
            (self.k * r).sinh() / self.k
        }
    }

    /// `S_λ'(r) / S_λ(r) = k coth(kr)`.
    #[inline]
    pub fn log_derivative(&self, r: f64) -> f64 {
        self.k * coth(self.k * r)
    }

    /// `S_λ(r)^m`, with `S^0 = 1` also at `r = 0`.
    #[inline]
    pub fn weight(&self, r: f64, m: i32) -> f64 {
        if m == 0 {
            1.0
        } else if r == 0.0 {
            if m > 0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.s(r).powi(m)
        }
    }

    /// `∫_r^∞ S_λ^m(s) e^{-a(s-r)} ds`; requires `a > m k`.
    pub fn exp_tail(&self, m: i32, a: f64, r: f64) -> Result<f64> {
        let k = self.k;
        Ok(sinh_power_exp_tail_signed(m, a / k, k * r)? / k.powi(m + 1))
    }
}

/// `γ(λ) = ((N-1) + sqrt((N-1)² + 4/λ))/2`, the root of `λ(γ² - (N-1)γ) = 1`.
/// This is the decay rate at `λ = 1`; for the warped unit problem the tails
/// decay like `e^{-γ(1) r/√λ}`, see [`tail_exponent`].
pub fn decay_exponent_nonlinear(params: &ModelParams, lambda: f64) -> Result<f64> {
    decay_exponent_linearized(params, lambda, 0.0)
}

/// `((N-1) + sqrt((N-1)² + 4(1-τ)/λ))/2`.
pub fn decay_exponent_linearized(params: &ModelParams, lambda: f64, tau: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(1.0 - tau > 0.0) {
        return Err(Error::NoDecay(format!(
            "spectral parameter {tau} is not below the essential spectrum"
        )));
    }
    let m = params.drift();
    Ok((m + (m * m + 4.0 * (1.0 - tau) / lambda).sqrt()) / 2.0)
}

/// Indicial exponent of `-λ(z'' + (N-1)k z') + (1-τ)z = 0`, `k = 1/√λ`: the
/// far field of the warped linearized equation. Equals
/// [`decay_exponent_linearized`] at `λ = 1` and scales like `1/√λ`.
pub fn tail_exponent(params: &ModelParams, lambda: f64, tau: f64) -> Result<f64> {
    let k = Warp::new(lambda)?.k;
    Ok(decay_exponent_linearized(params, 1.0, tau)? * k)
}

/// Numerical settings shared by the solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericsConfig {
    /// Absolute truncation radius; `None` picks `r0 + max(30, 40/γ(λ))`.
    pub r_max: Option<f64>,
    /// Number of output nodes of every sampled profile.
    pub grid_points: usize,
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
    pub shoot_tol: f64,
    pub max_bisect: usize,
    /// Blow-up threshold; `None` uses `10·((p+1)/2)^{1/(p-1)}`.
    pub w_ceiling: Option<f64>,
    pub quad_tol: f64,
    /// Intervals of the finite-difference radial eigenproblem.
    pub eig_intervals: usize,
    /// Intervals of the finite-difference mode boundary-value problems.
    pub mode_intervals: usize,
    /// Step of the finite-difference ground-state oracle.
    pub fd_step: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            r_max: None,
            grid_points: 4001,
            ode_rel_tol: 1e-12,
            ode_abs_tol: 1e-300,
            shoot_tol: 1e-10,
            max_bisect: 200,
            w_ceiling: None,
            quad_tol: 1e-8,
            eig_intervals: 1 << 16,
            mode_intervals: 1 << 17,
            fd_step: 1e-3,
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("ode_rel_tol", self.ode_rel_tol),
            ("ode_abs_tol", self.ode_abs_tol),
            ("shoot_tol", self.shoot_tol),
            ("quad_tol", self.quad_tol),
            ("fd_step", self.fd_step),
        ];
        for (name, v) in tols {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if self.grid_points < 64 {
            return Err(Error::InvalidParams(format!(
                "grid_points must be at least 64, got {}",
                self.grid_points
            )));
        }
        if self.eig_intervals < 64 || self.mode_intervals < 64 {
            return Err(Error::InvalidParams(
                "eig_intervals and mode_intervals must be at least 64".into(),
            ));
        }
        if self.max_bisect == 0 {
            return Err(Error::InvalidParams("max_bisect must be positive".into()));
        }
        if let Some(c) = self.w_ceiling {
            if !(c > 1.0) {
                return Err(Error::InvalidParams(format!("w_ceiling must exceed 1, got {c}")));
            }
        }
        Ok(())
    }

    /// Truncation radius for a profile starting at `r0` with decay rate `gamma`.
    ///
    /// The span is capped so that `gamma·(r_max - r0) <= 600`, which keeps the
    /// tail values representable.
    pub fn r_max_for(&self, r0: f64, gamma: f64) -> Result<f64> {
        let r_max = match self.r_max {
            Some(r) => r,
            None => {
                let span = 30f64.max(40.0 / gamma).min(600.0 / gamma);
                r0 + span
            }
        };
        if !(r_max > r0) {
            return Err(Error::InvalidParams(format!(
                "r_max = {r_max} must exceed the inner radius {r0}"
            )));
        }
        Ok(r_max)
    }

    pub fn ceiling(&self, params: &ModelParams) -> f64 {
        self.w_ceiling
            .unwrap_or_else(|| 10.0 * params.peak_lower_bound())
    }
}

/// Ordered radial nodes on `[r0, r_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidParams("a grid needs at least two nodes".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("grid nodes must be strictly increasing".into()));
        }
        Ok(RadialGrid { nodes })
    }

    /// `n_intervals + 1` equally spaced nodes; the endpoints are exact.
    pub fn uniform(r0: f64, r_max: f64, n_intervals: usize) -> Result<Self> {
        if !(r_max > r0) || n_intervals == 0 {
            return Err(Error::InvalidParams(format!(
                "cannot build a grid on [{r0}, {r_max}] with {n_intervals} intervals"
            )));
        }
        let h = (r_max - r0) / n_intervals as f64;
        let mut nodes: Vec<f64> = (0..=n_intervals).map(|i| r0 + i as f64 * h).collect();
        nodes[n_intervals] = r_max;
        Ok(RadialGrid { nodes })
    }

    /// `n_intervals + 1` nodes `r0 + L(e^{αx} - 1)/(e^α - 1)`, `x = j/n`,
    /// clustered toward `r0` for `α > 0`. Doubling `n_intervals` keeps every
    /// node.
    pub fn graded(r0: f64, r_max: f64, n_intervals: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParams(format!("grading must be positive, got {alpha}")));
        }
        let mut grid = Self::uniform(0.0, 1.0, n_intervals)?;
        let len = r_max - r0;
        let denom = alpha.exp_m1();
        for x in grid.nodes.iter_mut() {
            *x = r0 + len * (alpha * *x).exp_m1() / denom;
        }
        grid.nodes[n_intervals] = r_max;
        Ok(grid)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r0(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index `i` with `nodes[i] <= r <= nodes[i+1]`, clamped to the valid range.
    pub fn interval(&self, r: f64) -> usize {
        let k = self.nodes.partition_point(|&x| x <= r);
        k.saturating_sub(1).min(self.nodes.len() - 2)
    }
}

/// A radial function sampled with first derivatives, plus the exponential
/// tail used beyond the last node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    pub decay_exponent: f64,
    /// Power of `sinh r` in the volume weight (normally `N - 1`).
    pub weight_power: i32,
    /// Scaling parameter `λ` of the equation the profile solves.
    pub lambda: f64,
}

impl RadialProfile {
    pub fn new(
        grid: RadialGrid,
        values: Vec<f64>,
        derivatives: Vec<f64>,
        decay_exponent: f64,
        weight_power: i32,
        lambda: f64,
    ) -> Result<Self> {
        if values.len() != grid.len() || derivatives.len() != grid.len() {
            return Err(Error::InvalidParams(format!(
                "profile arrays have lengths {} and {} but the grid has {} nodes",
                values.len(),
                derivatives.len(),
                grid.len()
            )));
        }
        Ok(RadialProfile {
            grid,
            values,
            derivatives,
            decay_exponent,
            weight_power,
            lambda,
        })
    }

    pub fn zeros_like(other: &RadialProfile) -> RadialProfile {
        RadialProfile {
            grid: other.grid.clone(),
            values: vec![0.0; other.len()],
            derivatives: vec![0.0; other.len()],
            ..other.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn r0(&self) -> f64 {
        self.grid.r0()
    }

    pub fn r_max(&self) -> f64 {
        self.grid.r_max()
    }

    /// Value and derivative at `r`. Cubic Hermite between nodes, the
    /// exponential tail beyond `r_max`; `r < r0` is clamped to `r0`.
    pub fn eval_with_derivative(&self, r: f64) -> (f64, f64) {
        let nodes = self.grid.nodes();
        let last = nodes.len() - 1;
        if r >= nodes[last] {
            let v = self.values[last] * (-self.decay_exponent * (r - nodes[last])).exp();
            return (v, -self.decay_exponent * v);
        }
        if r <= nodes[0] {
            return (self.values[0], self.derivatives[0]);
        }
        let i = self.grid.interval(r);
        let (x0, x1) = (nodes[i], nodes[i + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivatives[i] * h, self.derivatives[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
        let dh00 = 6.0 * t2 - 6.0 * t;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = -6.0 * t2 + 6.0 * t;
        let dh11 = 3.0 * t2 - 2.0 * t;
        let dv = (dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1) / h;
        (v, dv)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_with_derivative(r).0
    }

    /// Node index and value of the largest sample.
    pub fn argmax(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc })
    }

    /// Location and value of the interior maximum, refined between nodes by
    /// bisection on the interpolated derivative.
    pub fn peak(&self) -> (f64, f64) {
        let (i, v) = self.argmax();
        let nodes = self.nodes();
        let (mut a, mut b) = (nodes[i.saturating_sub(1)], nodes[(i + 1).min(nodes.len() - 1)]);
        if !(self.eval_with_derivative(a).1 > 0.0 && self.eval_with_derivative(b).1 < 0.0) {
            return (nodes[i], v);
        }
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if self.eval_with_derivative(m).1 > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let r = 0.5 * (a + b);
        (r, self.eval(r))
    }

    pub fn scaled(&self, factor: f64) -> RadialProfile {
        RadialProfile {
            values: self.values.iter().map(|v| v * factor).collect(),
            derivatives: self.derivatives.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Resample on another grid by Hermite interpolation.
    pub fn resample(&self, grid: RadialGrid) -> RadialProfile {
        let (values, derivatives) = grid
            .nodes()
            .iter()
            .map(|&r| self.eval_with_derivative(r))
            .unzip();
        RadialProfile {
            grid,
            values,
            derivatives,
            ..self.clone()
        }
    }
}

/// `∫_r^∞ sinh^m(s) e^{-a(s-r)} ds` for `a > m`, using the binomial
/// expansion of `sinh^m`.
pub fn sinh_power_exp_tail(m: i32, a: f64, r: f64) -> Result<f64> {
    if m < 0 {
        return Err(Error::Domain(format!("tail integral needs a nonnegative power, got {m}")));
    }
    if !(a > m as f64) {
        return Err(Error::NoDecay(format!(
            "tail exponent {a} does not dominate the weight growth {m}"
        )));
    }
    let mut binom = 1.0;
    let mut total = 0.0;
    for j in 0..=m {
        let c = (m - 2 * j) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * binom * (c * r).exp() / (a - c);
        binom = binom * (m - j) as f64 / (j + 1) as f64;
    }
    Ok(total / 2f64.powi(m))
}

/// Composite Simpson rule on arbitrary increasing nodes (pairs of intervals;
/// an odd trailing interval gets the three-point end correction).
pub fn simpson(x: &[f64], f: &[f64]) -> f64 {
    let n = x.len();
    assert_eq!(n, f.len());
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * (x[1] - x[0]) * (f[0] + f[1]);
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut total = 0.0;
    let mut i = 0;
    while i < paired {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0
            * ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
        i += 2;
    }
    if intervals % 2 == 1 {
        let h0 = x[n - 2] - x[n - 3];
        let h1 = x[n - 1] - x[n - 2];
        let alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        total += alpha * f[n - 1] + beta * f[n - 2] - eta * f[n - 3];
    }
    total
}

/// `∫ S_λ^m(r) f(r) g(r) dr` over the grid of `f` and `g` plus the exact
/// contribution of their exponential tails.
pub fn weighted_integral(f: &RadialProfile, g: &RadialProfile, m: i32) -> Result<f64> {
    if f.grid != g.grid {
        return Err(Error::Incompatible("profiles live on different grids".into()));
    }
    if f.lambda != g.lambda {
        return Err(Error::Incompatible("profiles carry different lambda".into()));
    }
    let warp = Warp::new(f.lambda)?;
    let nodes = f.nodes();
    let integrand: Vec<f64> = nodes
        .iter()
        .zip(f.values.iter().zip(&g.values))
        .map(|(&r, (a, b))| warp.weight(r, m) * a * b)
        .collect();
    let body = simpson(nodes, &integrand);
    let last = f.len() - 1;
    let tail_amp = f.values[last] * g.values[last];
    let tail = if tail_amp == 0.0 {
        0.0
    } else {
        tail_amp * warp.exp_tail(m, f.decay_exponent + g.decay_exponent, f.r_max())?
    };
    Ok(body + tail)
}

/// Tail integral allowing negative powers, for which `sinh^m` is bounded and
/// a geometric series in `e^{-2r}` converges fast at large `r`.
fn sinh_power_exp_tail_signed(m: i32, a: f64, r: f64) -> Result<f64> {
    if m >= 0 {
        return sinh_power_exp_tail(m, a, r);
    }
    // sinh^m(s) = 2^{-m} e^{m s} (1 - e^{-2s})^{m}, expanded in e^{-2s}.
    let k = -m;
    let mut coef = 1.0;
    let mut total = 0.0;
    for j in 0..200 {
        let c = m as f64 - 2.0 * j as f64;
        let term = coef * (c * r).exp() / (a - c);
        total += term;
        if term.abs() < 1e-18 * total.abs() {
            break;
        }
        coef *= (k + j) as f64 / (j + 1) as f64;
    }
    Ok(total * 2f64.powi(k))
}

/// Weighted `L²` inner product `∫ S_λ^{N-1}(r) f g dr` including the tails.
pub fn weighted_l2_inner(f: &RadialProfile, g: &RadialProfile) -> Result<f64> {
    if f.weight_power != g.weight_power {
        return Err(Error::Incompatible(format!(
            "weight powers differ ({} vs {})",
            f.weight_power, g.weight_power
        )));
    }
    weighted_integral(f, g, f.weight_power)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_supercritical_exponent() {
        assert!(ModelParams::new(3, 5.0).is_err());
        assert!(ModelParams::new(3, 4.99).is_ok());
        assert!(ModelParams::new(2, 50.0).is_ok());
        assert!(ModelParams::new(1, 2.0).is_err());
        assert!(ModelParams::new(4, 1.0).is_err());
    }

    #[test]
    fn metric_factors_at_one() {
        let (s, _, cothr) = metric_factors(1.0).unwrap();
        let e2 = 1f64.exp().powi(2);
        assert!((cothr - (e2 + 1.0) / (e2 - 1.0)).abs() < 1e-15);
        assert!((cothr - 1.313035).abs() < 1e-6);
        assert!((s - 1.175201).abs() < 1e-6);
        assert!((s * s - 1.381098).abs() < 1e-6);
        assert!(metric_factors(0.0).is_err());
        assert!((metric_factors(12.0).unwrap().2 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coth_matches_direct_formula() {
        for &r in &[0.1f64, 1.0, 5.0, 19.9, 20.1, 40.0] {
            let direct = r.cosh() / r.sinh();
            assert!((coth(r) - direct).abs() < 1e-15 * direct, "r = {r}");
        }
    }

    #[test]
    fn decay_exponents() {
        let p2 = ModelParams::new(2, 3.0).unwrap();
        let p3 = ModelParams::new(3, 3.0).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((decay_exponent_nonlinear(&p2, 1.0).unwrap() - golden).abs() < 1e-15);
        assert!((decay_exponent_nonlinear(&p3, 1.0).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!((decay_exponent_nonlinear(&p3, 4.0).unwrap() - 2.118034).abs() < 1e-6);
        assert!((decay_exponent_linearized(&p3, 1.0, 0.0).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!((decay_exponent_linearized(&p2, 1.0, 0.0).unwrap() - golden).abs() < 1e-15);
        assert!((decay_exponent_linearized(&p3, 1.0, -1.0).unwrap() - 2.732051).abs() < 1e-6);
        assert!(matches!(
            decay_exponent_linearized(&p3, 1.0, 1.0),
            Err(Error::NoDecay(_))
        ));
    }

    #[test]
    fn default_truncation_radius() {
        let cfg = NumericsConfig::default();
        assert_eq!(cfg.r_max_for(1.0, 2.0).unwrap(), 31.0);
        assert_eq!(cfg.r_max_for(1.0, 0.5).unwrap(), 81.0);
        let fixed = NumericsConfig { r_max: Some(0.5), ..Default::default() };
        assert!(fixed.r_max_for(1.0, 1.0).is_err());
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let grid = RadialGrid::uniform(1.0, 3.0, 7).unwrap();
        let f = |r: f64| r * r * r - 2.0 * r + 1.0;
        let df = |r: f64| 3.0 * r * r - 2.0;
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        let derivs = grid.nodes().iter().map(|&r| df(r)).collect();
        let prof = RadialProfile::new(grid, values, derivs, 1.0, 2, 1.0).unwrap();
        for &r in &[1.0, 1.13, 1.5, 2.71, 2.9999] {
            let (v, d) = prof.eval_with_derivative(r);
            assert!((v - f(r)).abs() < 1e-12);
            assert!((d - df(r)).abs() < 1e-11);
        }
        let tail = prof.eval(4.0);
        assert!((tail - f(3.0) * (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn simpson_exact_for_quadratics_on_uneven_nodes() {
        let x = [0.0, 0.3, 0.5, 1.1, 1.2, 2.0];
        let f: Vec<f64> = x.iter().map(|&t| 3.0 * t * t - t + 2.0).collect();
        let exact = 8.0 - 2.0 + 4.0;
        assert!((simpson(&x, &f) - exact).abs() < 1e-12);
    }

    #[test]
    fn tail_integral_against_quadrature() {
        let (m, a, r) = (2, 5.5, 3.0);
        let closed = sinh_power_exp_tail(m, a, r).unwrap();
        let n = 200_000;
        let h = 40.0 / n as f64;
        let x: Vec<f64> = (0..=n).map(|i| r + i as f64 * h).collect();
        let f: Vec<f64> = x.iter().map(|&s| s.sinh().powi(m) * (-a * (s - r)).exp()).collect();
        assert!((simpson(&x, &f) - closed).abs() < 1e-9 * closed);
        assert!(sinh_power_exp_tail(2, 1.5, r).is_err());
        let neg = sinh_power_exp_tail_signed(-1, 2.0, r).unwrap();
        let f: Vec<f64> = x.iter().map(|&s| (-2.0 * (s - r)).exp() / s.sinh()).collect();
        assert!((simpson(&x, &f) - neg).abs() < 1e-9 * neg);
    }
}
