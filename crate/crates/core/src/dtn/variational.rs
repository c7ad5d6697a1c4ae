//! Independent check of `σ`: the stationary value of `Q̃_λ(c ζ)/λ` over
//! piecewise-linear `c` with `c(1) = 1`, assembled with Gauss quadrature on a
//! mesh graded toward the boundary. Above the Dirichlet pole the quadratic
//! form is coercive on the constrained set and this is its minimum.

use crate::error::{Error, Result};
use crate::harmonics::sphere_eigenvalue;
use crate::linalg::{gauss_legendre, solve_tridiagonal};
use crate::model::{ModelParams, RadialProfile, Warp};

use super::boundary_constant;

/// Grading strength of the mesh `r = 1 + L(e^{αx} - 1)/(e^α - 1)`.
const GRADING: f64 = 4.0;

/// `min { Q̃_λ(cζ) : c(1) = 1 } / (λ S^{N-1}(1))` on `elements` linear
/// elements, with `c = 0` at the far end of the profile grid.
pub fn sigma_variational(degree: usize, u: &RadialProfile, params: &ModelParams, elements: usize) -> Result<f64> {
    if (u.r0() - 1.0).abs() > 1e-14 {
        return Err(Error::Precondition("mode problems live outside the unit ball".into()));
    }
    if elements < 4 {
        return Err(Error::InvalidParams("need at least four elements".into()));
    }
    let lam = u.lambda;
    let warp = Warp::new(lam)?;
    let mu = sphere_eigenvalue(degree, params.n);
    let m = params.weight_power();
    let p = params.p;
    let len = u.r_max() - 1.0;
    let mesh: Vec<f64> = (0..=elements)
        .map(|j| {
            let x = j as f64 / elements as f64;
            1.0 + len * (GRADING * x).exp_m1() / GRADING.exp_m1()
        })
        .collect();

    let (gx, gw) = gauss_legendre(4);
    let nn = mesh.len();
    let mut diag = vec![0.0; nn];
    let mut off = vec![0.0; nn - 1];
    for e in 0..elements {
        let (a, b) = (mesh[e], mesh[e + 1]);
        let h = b - a;
        let mut k = 0.0; // ∫ λ S^m φ'²  (φ' = ±1/h)
        let mut m00 = 0.0;
        let mut m01 = 0.0;
        let mut m11 = 0.0;
        for (x, w) in gx.iter().zip(&gw) {
            let t = 0.5 * (1.0 + x);
            let r = a + h * t;
            let s = warp.s(r);
            let weight = 0.5 * h * w * s.powi(m);
            let uv = u.eval(r).max(0.0);
            let pot = 1.0 - p * uv.powf(p - 1.0) + lam * mu / (s * s);
            k += weight * lam / (h * h);
            let (f0, f1) = (1.0 - t, t);
            m00 += weight * pot * f0 * f0;
            m01 += weight * pot * f0 * f1;
            m11 += weight * pot * f1 * f1;
        }
        diag[e] += k + m00;
        diag[e + 1] += k + m11;
        off[e] += -k + m01;
    }

    // Unknowns are nodes 1..nn-2; c_0 = 1 and c_{nn-1} = 0.
    let inner = nn - 2;
    let d: Vec<f64> = diag[1..nn - 1].to_vec();
    let sub: Vec<f64> = off[1..inner].to_vec();
    let mut rhs = vec![0.0; inner];
    rhs[0] = -off[0];
    let c_inner = solve_tridiagonal(&sub, &d, &sub, &rhs)?;
    let mut c = vec![1.0];
    c.extend(c_inner);
    c.push(0.0);
    let energy: f64 = (0..nn).map(|i| diag[i] * c[i] * c[i]).sum::<f64>()
        + 2.0 * (0..nn - 1).map(|i| off[i] * c[i] * c[i + 1]).sum::<f64>();
    let s1 = warp.weight(1.0, m);
    let qtilde = energy - lam * boundary_constant(params, lam) * s1;
    Ok(qtilde / (lam * s1))
}
