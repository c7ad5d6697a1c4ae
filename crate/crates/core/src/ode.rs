//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Differences between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Whether the integration should go on after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    h: f64,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Dopri5 {
            rtol,
            atol,
            max_steps: 2_000_000,
            h: 0.0,
        }
    }

    /// Integrate from `t0` to `t1` (either direction). `observer` sees every
    /// accepted step and may stop early. Returns the final time and state.
    pub fn integrate<const D: usize, F, O>(
        &mut self,
        f: F,
        t0: f64,
        y0: [f64; D],
        t1: f64,
        mut observer: O,
    ) -> Result<(f64, [f64; D])>
    where
        F: Fn(f64, &[f64; D]) -> [f64; D],
        O: FnMut(f64, &[f64; D]) -> Control,
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok((t0, y0));
        }
        let dir = span.signum();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = if self.h != 0.0 && self.h.signum() == dir {
            self.h.abs()
        } else {
            self.initial_step(&f, t, &y, &k1, dir)
        };
        h = h.min(span.abs());
        let h_floor = 1e-14 * (t0.abs().max(t1.abs()).max(1.0));
        let mut steps = 0;
        loop {
            if steps >= self.max_steps {
                return Err(Error::Convergence(format!(
                    "step budget exhausted at t = {t}"
                )));
            }
            steps += 1;
            let remaining = (t1 - t).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h } * dir;
            let (y_new, k7, err) = self.step(&f, t, &y, &k1, hs);
            if err <= 1.0 || hs.abs() <= h_floor {
                t = if last { t1 } else { t + hs };
                y = y_new;
                k1 = k7;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    h = hs.abs() * fac;
                } else {
                    self.h = dir * hs.abs().max(h.min(hs.abs() * fac));
                }
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Convergence(format!("non-finite state at t = {t}")));
                }
                if observer(t, &y) == Control::Stop || last {
                    if !last {
                        self.h = dir * h;
                    }
                    return Ok((t, y));
                }
            } else {
                h = hs.abs() * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
    }

    fn initial_step<const D: usize, F>(&self, f: &F, t: f64, y: &[f64; D], k1: &[f64; D], dir: f64) -> f64
    where
        F: Fn(f64, &[f64; D]) -> [f64; D],
    {
        let scale = |i: usize| self.atol + self.rtol * y[i].abs();
        let norm = |v: &dyn Fn(usize) -> f64| (0..D).map(|i| (v(i) / scale(i)).abs()).fold(0.0, f64::max);
        let d0 = norm(&|i| y[i]);
        let d1 = norm(&|i| k1[i]);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let mut y1 = *y;
        for i in 0..D {
            y1[i] += dir * h0 * k1[i];
        }
        let k2 = f(t + dir * h0, &y1);
        let d2 = norm(&|i| k2[i] - k1[i]) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        let h = (100.0 * h0).min(h1);
        if h.is_finite() && h > 0.0 {
            h
        } else {
            1e-8
        }
    }

    fn step<const D: usize, F>(&self, f: &F, t: f64, y: &[f64; D], k1: &[f64; D], h: f64) -> ([f64; D], [f64; D], f64)
    where
        F: Fn(f64, &[f64; D]) -> [f64; D],
    {
        let comb = |coefs: &[(f64, &[f64; D])]| {
            let mut out = *y;
            for (c, k) in coefs {
                for i in 0..D {
                    out[i] += h * c * k[i];
                }
            }
            out
        };
        let k2 = f(t + C2 * h, &comb(&[(A21, k1)]));
        let k3 = f(t + C3 * h, &comb(&[(A31, k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &comb(&[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h, &comb(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + h, &comb(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = comb(&[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new);
        let mut err: f64 = 0.0;
        for i in 0..D {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        (y_new, k7, err)
    }
}
