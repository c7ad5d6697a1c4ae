//! The radial ODE `λ(w'' + (N-1)(S_λ'/S_λ) w') + w₊^p - w = 0` and its
//! linearization, written as first-order systems. `S_λ'/S_λ = k coth(kr)`
//! with `k = 1/√λ`; at `λ = 1` the drift is `(N-1)coth(r)`.

use crate::model::{coth, ModelParams};

#[derive(Debug, Clone, Copy)]
pub struct RadialEquation {
    pub drift: f64,
    pub p: f64,
    pub lambda: f64,
    /// Curvature scale `1/√λ`.
    pub k: f64,
}

impl RadialEquation {
    pub fn new(params: &ModelParams, lambda: f64) -> Self {
        RadialEquation {
            drift: params.drift(),
            p: params.p,
            lambda,
            k: 1.0 / lambda.sqrt(),
        }
    }

    /// `(N-1) S_λ'(r)/S_λ(r)`.
    #[inline]
    pub fn drift_coefficient(&self, r: f64) -> f64 {
        self.drift * self.k * coth(self.k * r)
    }

    #[inline]
    pub fn nonlinearity(&self, w: f64) -> f64 {
        w.max(0.0).powf(self.p) - w
    }

    #[inline]
    pub fn nonlinearity_derivative(&self, w: f64) -> f64 {
        self.p * w.max(0.0).powf(self.p - 1.0) - 1.0
    }

    /// `w''` given `(r, w, w')`. Near the pole the drift is replaced by its
    /// regular limit `(N-1)w''`, so `N w'' = -f(w)/λ`.
    #[inline]
    pub fn second_derivative(&self, r: f64, w: f64, dw: f64) -> f64 {
        if r < 1e-8 {
            return -self.nonlinearity(w) / (self.lambda * (self.drift + 1.0));
        }
        -self.drift_coefficient(r) * dw - self.nonlinearity(w) / self.lambda
    }

    pub fn rhs(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], self.second_derivative(r, y[0], y[1])]
    }

    /// State extended by the first variation `(v, v')` along a parameter.
    pub fn rhs_variational(&self, r: f64, y: &[f64; 4]) -> [f64; 4] {
        let c = if r < 1e-8 { 0.0 } else { self.drift_coefficient(r) };
        let lin = self.nonlinearity_derivative(y[0]);
        [
            y[1],
            self.second_derivative(r, y[0], y[1]),
            y[3],
            -c * y[3] - lin * y[2] / self.lambda,
        ]
    }

    /// `λw'²/2 + w^{p+1}/(p+1) - w²/2`, nonincreasing along solutions.
    #[inline]
    pub fn energy(&self, w: f64, dw: f64) -> f64 {
        let wp = w.max(0.0);
        0.5 * self.lambda * dw * dw + wp.powf(self.p + 1.0) / (self.p + 1.0) - 0.5 * w * w
    }

    /// Pointwise residual of the ODE.
    pub fn residual(&self, r: f64, w: f64, dw: f64, ddw: f64) -> f64 {
        self.lambda * (ddw + self.drift_coefficient(r) * dw) + self.nonlinearity(w)
    }
}
