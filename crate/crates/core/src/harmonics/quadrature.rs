//! Product Gauss rules on `S¹`, `S²` and `S³`, exact for polynomials up to a
//! chosen degree, and surface areas.

use crate::error::{Error, Result};
use crate::linalg::gauss_legendre;
use std::f64::consts::PI;

/// `|S^{n-1}|`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI / (n as f64 - 2.0) * sphere_area(n - 2),
    }
}

#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Rule on `S^{n-1}` exact for polynomials of degree `≤ degree`.
pub fn sphere_quadrature(n: usize, degree: usize) -> Result<SphereQuadrature> {
    let m = degree + 1;
    let gl = (degree + 2) / 2 + 1;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let angle = |k: usize| 2.0 * PI * k as f64 / m as f64;
    match n {
        2 => {
            for k in 0..m {
                let (s, c) = angle(k).sin_cos();
                points.push(vec![c, s]);
                weights.push(2.0 * PI / m as f64);
            }
        }
        3 => {
            let (t, w) = gauss_legendre(gl);
            for (&z, &wz) in t.iter().zip(&w) {
                let rho = (1.0 - z * z).sqrt();
                for k in 0..m {
                    let (s, c) = angle(k).sin_cos();
                    points.push(vec![rho * c, rho * s, z]);
                    weights.push(wz * 2.0 * PI / m as f64);
                }
            }
        }
        4 => {
            // Hopf coordinates with s = sin²η ∈ [0, 1]; dσ = ½ ds dξ₁ dξ₂.
            let (t, w) = gauss_legendre(gl);
            for (&x, &wx) in t.iter().zip(&w) {
                let s = 0.5 * (x + 1.0);
                let ws = 0.5 * wx;
                let (a, b) = ((1.0 - s).sqrt(), s.sqrt());
                for k1 in 0..m {
                    let (s1, c1) = angle(k1).sin_cos();
                    for k2 in 0..m {
                        let (s2, c2) = angle(k2).sin_cos();
                        points.push(vec![a * c1, a * s1, b * c2, b * s2]);
                        weights.push(0.5 * ws * (2.0 * PI / m as f64).powi(2));
                    }
                }
            }
        }
        _ => return Err(Error::Config(format!("no sphere quadrature for N = {n}"))),
    }
    Ok(SphereQuadrature { n, points, weights })
}
