//! Executable checks of the qualitative properties of the exterior ground
//! state: the sign structure of `G'`, the decay rate, the monotone energy and
//! the single-peak shape.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{tail_exponent, ModelParams, RadialProfile, Warp};

/// Relative size below which a sample of `F` is treated as zero.
const SIGN_TOL: f64 = 1e-12;
/// Allowed relative increase of the energy between consecutive nodes.
const ENERGY_MONOTONE_TOL: f64 = 1e-12;
const ENERGY_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignKind {
    AlwaysNegative,
    OneSignChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignPattern {
    pub kind: SignKind,
    pub change_point: Option<f64>,
}

/// The exponents `α = 2(N-1)/(p+3)` and `β = α(p-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GExponents {
    pub alpha: f64,
    pub beta: f64,
    n: f64,
}

impl GExponents {
    pub fn new(params: &ModelParams) -> Self {
        let alpha = 2.0 * (params.n as f64 - 1.0) / (params.p + 3.0);
        GExponents {
            alpha,
            beta: alpha * (params.p - 1.0),
            n: params.n as f64,
        }
    }

    /// `G(r) = -S^β + α S^{β-2}((α+2-N)C² - S²)`.
    pub fn g(&self, r: f64) -> f64 {
        let (a, b, n) = (self.alpha, self.beta, self.n);
        let (s, c) = (r.sinh(), r.cosh());
        -s.powf(b) + a * s.powf(b - 2.0) * ((a + 2.0 - n) * c * c - s * s)
    }

    /// The bracket `F` in `G'(r) = S^{β-1}(r) C(r) F(r)`, written as its
    /// limit plus the decaying part so that rounding cannot hide the
    /// monotonicity at large `r`.
    pub fn f(&self, r: f64) -> f64 {
        self.f_limit() + self.f_decaying(r)
    }

    /// `α(β-2)(α+2-N)/S²(r)`: `F` minus its limit, using `coth² = 1 + 1/S²`.
    pub fn f_decaying(&self, r: f64) -> f64 {
        let (a, b, n) = (self.alpha, self.beta, self.n);
        let s = r.sinh();
        a * (b - 2.0) * (a + 2.0 - n) / (s * s)
    }

    pub fn g_prime(&self, r: f64) -> f64 {
        r.sinh().powf(self.beta - 1.0) * r.cosh() * self.f(r)
    }

    /// `lim_{r→∞} F(r) = β(α(α+1-N) - 1)`.
    pub fn f_limit(&self) -> f64 {
        self.beta * (self.alpha * (self.alpha + 1.0 - self.n) - 1.0)
    }
}

/// Sign structure of `G'` on `(R, R + span]`, sampled at `r_samples`
/// log-spaced offsets from `R`.
pub fn analyze_g_sign(params: &ModelParams, big_r: f64, r_samples: usize) -> Result<SignPattern> {
    analyze_g_sign_on(params, big_r, 30.0, r_samples)
}

pub fn analyze_g_sign_on(params: &ModelParams, big_r: f64, span: f64, r_samples: usize) -> Result<SignPattern> {
    params.validate()?;
    if !(big_r > 0.0) {
        return Err(Error::InvalidParams(format!("R must be positive, got {big_r}")));
    }
    if r_samples < 8 {
        return Err(Error::InvalidParams("need at least 8 samples".into()));
    }
    let ge = GExponents::new(params);
    // Offsets from 1e-6 to `span`, log-spaced, plus R itself.
    let (lo, hi) = (1e-6f64.ln(), span.ln());
    let mut rs = vec![big_r];
    rs.extend((0..r_samples - 1).map(|i| big_r + (lo + (hi - lo) * i as f64 / (r_samples - 2) as f64).exp()));
    let fs: Vec<f64> = rs.iter().map(|&r| ge.f(r)).collect();

    if params.n >= 3 {
        let parts: Vec<f64> = rs.iter().map(|&r| ge.f_decaying(r)).collect();
        if let Some(i) = parts.windows(2).position(|w| !(w[1] < w[0])) {
            return Err(Error::lemma(
                "g-sign",
                format!("F is not strictly decreasing between r = {} and {}", rs[i], rs[i + 1]),
            ));
        }
    }
    if !(ge.f_limit() < 0.0) || !(fs[fs.len() - 1] < 0.0) {
        return Err(Error::lemma("g-sign", "liminf G' is not negative"));
    }

    let scale = fs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let signs: Vec<i8> = fs
        .iter()
        .map(|&v| {
            if v > SIGN_TOL * scale {
                1
            } else if v < -SIGN_TOL * scale {
                -1
            } else {
                0
            }
        })
        .collect();
    let significant: Vec<(usize, i8)> = signs.iter().copied().enumerate().filter(|&(_, s)| s != 0).collect();
    let changes: Vec<usize> = significant
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| w[0].0)
        .collect();

    let pattern = match (changes.as_slice(), significant.first()) {
        ([], Some(&(_, -1))) => SignPattern {
            kind: SignKind::AlwaysNegative,
            change_point: None,
        },
        ([i], Some(&(_, 1))) => {
            let j = significant.iter().find(|&&(k, _)| k > *i).map(|&(k, _)| k).unwrap_or(*i + 1);
            let (mut a, mut b) = (rs[*i], rs[j]);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if ge.f(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            SignPattern {
                kind: SignKind::OneSignChange,
                change_point: Some(0.5 * (a + b)),
            }
        }
        _ => {
            return Err(Error::lemma(
                "g-sign",
                format!("G' shows {} sign changes starting from sign {:?}", changes.len(), significant.first()),
            ))
        }
    };
    if params.n == 2 && pattern.kind != SignKind::AlwaysNegative {
        return Err(Error::lemma("g-sign", "G' changes sign for N = 2"));
    }
    Ok(pattern)
}

/// Upper bound `N + √(2 + (N-1)²)` on `-w'/w`.
pub fn decay_ratio_bound(params: &ModelParams) -> f64 {
    let n = params.n as f64;
    n + (2.0 + (n - 1.0).powi(2)).sqrt()
}

/// Mean of `-w'/w` over the nodes in `[r_a, r_b]`.
pub fn estimate_decay_rate(profile: &RadialProfile, window: (f64, f64)) -> Result<f64> {
    let (ra, rb) = window;
    if !(ra < rb) || ra < profile.r0() || rb > profile.r_max() {
        return Err(Error::Domain(format!(
            "window [{ra}, {rb}] is not inside [{}, {}]",
            profile.r0(),
            profile.r_max()
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((&r, &w), &dw) in profile.nodes().iter().zip(&profile.values).zip(&profile.derivatives) {
        if r < ra || r > rb {
            continue;
        }
        if !(w > 0.0) {
            return Err(Error::Domain(format!("profile vanishes at r = {r} inside the window")));
        }
        sum += -dw / w;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Domain("window contains no grid nodes".into()));
    }
    Ok(sum / count as f64)
}

/// Default decay window `[r_max - 10, r_max - 2]`.
pub fn default_decay_window(profile: &RadialProfile) -> (f64, f64) {
    let r_max = profile.r_max();
    ((r_max - 10.0).max(profile.r0()), r_max - 2.0)
}

/// `E = λw'²/2 + w^{p+1}/(p+1) - w²/2` with `E' = -λ(N-1)(S_λ'/S_λ) w'²`.
///
/// Fails with a lemma violation if `E` increases between nodes or ends
/// below `-1e-8`.
pub fn energy_profile(profile: &RadialProfile, params: &ModelParams) -> Result<RadialProfile> {
    let lam = profile.lambda;
    let warp = Warp::new(lam)?;
    let drift = params.drift();
    let p = params.p;
    let mut values = Vec::with_capacity(profile.len());
    let mut derivs = Vec::with_capacity(profile.len());
    for ((&r, &w), &dw) in profile.nodes().iter().zip(&profile.values).zip(&profile.derivatives) {
        let wp = w.max(0.0);
        values.push(0.5 * lam * dw * dw + wp.powf(p + 1.0) / (p + 1.0) - 0.5 * w * w);
        let log_d = if r > 0.0 { warp.log_derivative(r) } else { 0.0 };
        derivs.push(-lam * drift * log_d * dw * dw);
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(i) = values
        .windows(2)
        .position(|e| e[1] > e[0] + ENERGY_MONOTONE_TOL * scale)
    {
        return Err(Error::lemma(
            "energy-monotone",
            format!(
                "energy increases from {} to {} at r = {}",
                values[i],
                values[i + 1],
                profile.nodes()[i + 1]
            ),
        ));
    }
    let last = values[values.len() - 1];
    if last < -ENERGY_FLOOR {
        return Err(Error::lemma("energy-monotone", format!("energy ends at {last} < 0")));
    }
    RadialProfile::new(profile.grid.clone(), values, derivs, 2.0 * profile.decay_exponent, profile.weight_power, lam)
}

/// Checks that `w'` changes sign exactly once and the peak exceeds
/// `((p+1)/2)^{1/(p-1)}`. Returns the peak location and value.
pub fn profile_shape_check(profile: &RadialProfile, params: &ModelParams) -> Result<(f64, f64)> {
    let signs: Vec<bool> = profile.derivatives.iter().filter(|&&d| d != 0.0).map(|&d| d > 0.0).collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if changes != 1 || signs.first() != Some(&true) {
        return Err(Error::lemma(
            "single-peak",
            format!("w' changes sign {changes} times; expected exactly one critical point"),
        ));
    }
    let (r_peak, peak) = profile.peak();
    let bound = params.peak_lower_bound();
    if peak < bound {
        return Err(Error::lemma("single-peak", format!("peak {peak} below the lower bound {bound}")));
    }
    Ok((r_peak, peak))
}

/// One machine-readable verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub lemma: String,
    pub inputs: Value,
    pub verdict: String,
    pub witness: Value,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    fn from_result<T>(lemma: &str, inputs: Value, outcome: Result<T>, witness: impl FnOnce(&T) -> Value) -> Result<Verdict> {
        match outcome {
            Ok(v) => Ok(Verdict {
                lemma: lemma.into(),
                inputs,
                verdict: "pass".into(),
                witness: witness(&v),
            }),
            Err(Error::LemmaViolation { detail, .. }) => Ok(Verdict {
                lemma: lemma.into(),
                inputs,
                verdict: "fail".into(),
                witness: json!({ "detail": detail }),
            }),
            Err(e) => Err(e),
        }
    }
}

/// Run all four checks on an exterior ground state starting at `big_r`.
/// Lemma violations become failing verdicts; other errors propagate.
pub fn qualitative_report(params: &ModelParams, profile: &RadialProfile, big_r: f64) -> Result<Vec<Verdict>> {
    let inputs = json!({ "N": params.n, "p": params.p, "R": big_r, "lambda": profile.lambda });
    let mut out = Vec::with_capacity(4);
    out.push(Verdict::from_result(
        "g-sign",
        inputs.clone(),
        analyze_g_sign(params, big_r, 2000),
        |s| json!(s),
    )?);

    let window = default_decay_window(profile);
    let gamma = tail_exponent(params, profile.lambda, 0.0)?;
    let rate = estimate_decay_rate(profile, window)?;
    let bound = decay_ratio_bound(params);
    let max_ratio = profile
        .values
        .iter()
        .zip(&profile.derivatives)
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, &dw)| -dw / w)
        .fold(f64::NEG_INFINITY, f64::max);
    let decay_ok = (rate - gamma).abs() < 1e-2 && max_ratio < bound;
    out.push(Verdict {
        lemma: "decay-rate".into(),
        inputs: inputs.clone(),
        verdict: if decay_ok { "pass" } else { "fail" }.into(),
        witness: json!({ "window": [window.0, window.1], "rate": rate, "gamma": gamma,
                         "max_ratio": max_ratio, "ratio_bound": bound }),
    });

    out.push(Verdict::from_result(
        "energy-monotone",
        inputs.clone(),
        energy_profile(profile, params),
        |e| json!({ "E_inner": e.values[0], "E_outer": e.values[e.len() - 1] }),
    )?);
    out.push(Verdict::from_result(
        "single-peak",
        inputs,
        profile_shape_check(profile, params),
        |&(r, v)| json!({ "r_peak": r, "peak": v, "peak_bound": params.peak_lower_bound() }),
    )?);
    Ok(out)
}
