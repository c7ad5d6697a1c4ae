//! Bifurcation values `Λ*` (the last zero of `σ_{i_1}` with `σ < 0` to its
//! left), the radii `R* = Λ*^{-1/2}`, the sign certificates behind the
//! odd-multiplicity bifurcation argument and tangent perturbed domains
//! `R*(1 + εζ)` along a kernel mode `ζ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dtn::{lambda_grid_for, sigma_curve, sigma_eigenvalue, SigmaCurve};
use crate::error::{Error, Result};
use crate::harmonics::{check_g1, invariant_basis, sphere_area, sphere_quadrature, G1Report, GroupSpectrum, SymmetryGroup};
use crate::qualitative::Verdict;
use crate::radial::UnitProfileCache;

/// Target for `|σ(Λ*)|`.
pub const SIGMA_TOL: f64 = 1e-8;

/// Sign certificates sit at `Λ* ± δ` and `Λ* ± δ/2` with `δ = CERT_DELTA·Λ*`.
pub const CERT_DELTA: f64 = 1e-3;

/// Tolerance for the group-invariance and mean-zero checks on shapes.
pub const SHAPE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub degree: usize,
    pub lambda_star: f64,
    pub radius_star: f64,
    /// `σ(Λ*)` after refinement.
    pub sigma_star: f64,
    /// `σ(Λ* - δ)`.
    pub sign_left: f64,
    /// `σ(Λ* + δ)`.
    pub sign_right: f64,
    pub delta: f64,
    pub kernel_multiplicity: usize,
    /// Every bracket of the sampled curve with `σ < 0` on the left.
    pub brackets: Vec<(f64, f64)>,
    pub iterations: usize,
}

/// `λ^{-1/2}`.
pub fn radius_from_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(1.0 / lambda.sqrt())
}

pub fn bifurcation_radius(point: &BifurcationPoint) -> Result<f64> {
    radius_from_lambda(point.lambda_star)
}

fn sigma_at(degree: usize, lambda: f64, cache: &UnitProfileCache) -> Result<f64> {
    let u = cache.get(lambda)?;
    sigma_eigenvalue(degree, &u.profile, cache.params(), cache.config())
}

/// Refine the rightmost bracket of `curve` with `σ` negative on the left to
/// `|σ| < SIGMA_TOL` (Illinois regula falsi with bisection steps), then
/// evaluate `σ` afresh at `Λ* ± δ`.
pub fn find_lambda_star(curve: &SigmaCurve, cache: &UnitProfileCache, spectrum: &GroupSpectrum) -> Result<BifurcationPoint> {
    let degree = curve.degree;
    let entry = spectrum
        .entry(degree)
        .ok_or_else(|| Error::InvalidParams(format!("degree {degree} is not in the group spectrum")))?;
    let brackets: Vec<((f64, f64), (f64, f64))> = curve
        .brackets()
        .into_iter()
        .filter(|(l, _)| l.1 < 0.0)
        .collect();
    let &((mut lo, mut s_lo), (mut hi, mut s_hi)) = brackets.last().ok_or_else(|| {
        Error::NotFound(format!(
            "sigma_{degree} has no bracket with a negative left end on {} samples: {:?}",
            curve.samples.len(),
            curve.samples
        ))
    })?;

    let mut x = lo;
    let mut sx = s_lo;
    let mut side = 0i8;
    let mut iterations = 0;
    while sx.abs() >= SIGMA_TOL {
        iterations += 1;
        if iterations > 200 || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Err(Error::Convergence(format!(
                "bracket [{lo}, {hi}] for sigma_{degree} did not reach |sigma| < {SIGMA_TOL} (last {sx})"
            )));
        }
        // Every fourth step bisects, which bounds the Illinois stagnation.
        x = if iterations % 4 == 0 {
            0.5 * (lo + hi)
        } else {
            (lo * s_hi - hi * s_lo) / (s_hi - s_lo)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        sx = sigma_at(degree, x, cache)?;
        if sx < 0.0 {
            lo = x;
            s_lo = sx;
            if side == -1 {
                s_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            s_hi = sx;
            if side == 1 {
                s_lo *= 0.5;
            }
            side = 1;
        }
    }
    let delta = CERT_DELTA * x;
    let sides = [x - delta, x + delta]
        .par_iter()
        .map(|&l| sigma_at(degree, l, cache))
        .collect::<Result<Vec<_>>>()?;
    Ok(BifurcationPoint {
        degree,
        lambda_star: x,
        radius_star: radius_from_lambda(x)?,
        sigma_star: sx,
        sign_left: sides[0],
        sign_right: sides[1],
        delta,
        kernel_multiplicity: entry.m,
        brackets: brackets.iter().map(|(l, r)| (l.0, r.0)).collect(),
        iterations,
    })
}

/// Sample `σ_{degree}` on [`lambda_grid_for`] with `points` log points up to
/// `lambda_max` and refine its last zero.
pub fn locate_bifurcation(
    degree: usize,
    cache: &UnitProfileCache,
    spectrum: &GroupSpectrum,
    lambda_max: f64,
    points: usize,
) -> Result<(SigmaCurve, BifurcationPoint)> {
    let grid = lambda_grid_for(degree, cache, spectrum, lambda_max, points)?;
    let curve = sigma_curve(degree, &grid, cache)?;
    let point = find_lambda_star(&curve, cache, spectrum)?;
    Ok((curve, point))
}

/// Outcome of the numerically checkable hypotheses of the odd-multiplicity
/// bifurcation theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub g1: G1Report,
    pub checks: Vec<Verdict>,
    pub passed: bool,
}

fn verdict(name: &str, ok: bool, witness: serde_json::Value) -> Verdict {
    Verdict {
        lemma: name.into(),
        inputs: json!({}),
        verdict: if ok { "pass" } else { "fail" }.into(),
        witness,
    }
}

/// Group-level part of the certificate: the (G1) condition and the parity
/// of `m_1`. Needs no solves.
pub fn group_certificate(spectrum: &GroupSpectrum) -> Result<Certificate> {
    let g1 = check_g1(spectrum)?;
    let checks = vec![
        verdict("g1", g1.satisfied, json!(g1)),
        verdict(
            "odd-multiplicity",
            g1.m1_odd,
            json!({ "degree": g1.i1, "multiplicity": g1.m1 }),
        ),
    ];
    let passed = checks.iter().all(Verdict::passed);
    Ok(Certificate { g1, checks, passed })
}

/// Full certificate at a located point: the group-level checks, a sign
/// change of `σ_{i_1}` at `Λ* ± δ` and at `Λ* ± δ/2`, and positivity of every
/// other `σ_{i_k}` of `spectrum` at `Λ*`. Failing hypotheses are reported,
/// not raised.
pub fn certify_local_bifurcation(point: &BifurcationPoint, cache: &UnitProfileCache, spectrum: &GroupSpectrum) -> Result<Certificate> {
    let mut cert = group_certificate(spectrum)?;
    let lam = point.lambda_star;
    let d = point.delta;
    let probes = [lam - d, lam - 0.5 * d, lam + 0.5 * d, lam + d];
    let signs = probes
        .par_iter()
        .map(|&l| sigma_at(point.degree, l, cache))
        .collect::<Result<Vec<_>>>()?;
    let crossing = signs[0] < 0.0 && signs[1] < 0.0 && signs[2] > 0.0 && signs[3] > 0.0;
    cert.checks.push(verdict(
        "crossing",
        crossing,
        json!({ "lambda": probes, "sigma": signs, "sigma_star": point.sigma_star }),
    ));

    let is_first = spectrum.first().map(|e| e.i) == Some(point.degree);
    let others: Vec<usize> = spectrum.entries.iter().map(|e| e.i).filter(|&i| i != point.degree).collect();
    let higher = others
        .par_iter()
        .map(|&i| Ok((i, sigma_at(i, lam, cache)?)))
        .collect::<Result<Vec<(usize, f64)>>>()?;
    let positive = is_first && higher.iter().all(|&(_, s)| s > 0.0);
    cert.checks.push(verdict(
        "higher-modes-positive",
        positive,
        json!({ "kernel_degree_is_first": is_first, "sigma": higher }),
    ));
    cert.passed = cert.checks.iter().all(Verdict::passed);
    Ok(cert)
}

/// Boundary samples `R*(1 + εζ(θ))` of a tangent perturbed domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryShape {
    pub base_radius: f64,
    pub epsilon: f64,
    pub degree: usize,
    /// Coefficients of `ζ` in the orthonormal invariant basis.
    pub coefficients: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// Quadrature weights of `points` (surface measure).
    pub weights: Vec<f64>,
    pub radii: Vec<f64>,
    /// `max |ζ(gθ) - ζ(θ)|` over samples and group elements.
    pub invariance_defect: f64,
    /// `|mean of (radius/R* - 1)|` over the sphere.
    pub mean_defect: f64,
}

impl BoundaryShape {
    /// CSV with the unit-vector coordinates, weight and radius.
    pub fn to_csv(&self) -> String {
        let n = self.points.first().map_or(0, Vec::len);
        let mut out: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        out.push("weight".into());
        out.push("radius".into());
        let mut s = out.join(",");
        s.push('\n');
        for ((x, w), r) in self.points.iter().zip(&self.weights).zip(&self.radii) {
            for v in x {
                s.push_str(&format!("{v:.17e},"));
            }
            s.push_str(&format!("{w:.17e},{r:.17e}\n"));
        }
        s
    }
}

/// Largest group order for which invariance is checked against every
/// element; larger groups are checked against an evenly strided subset.
const MAX_CHECKED_ELEMENTS: usize = 240;

/// Sample `R*(1 + εζ)` on a sphere quadrature with at least `n_samples`
/// nodes, `ζ` the first orthonormal invariant harmonic of the bifurcation
/// degree. Checks group invariance and zero mean to `SHAPE_TOL`.
pub fn emit_perturbed_domain(point: &BifurcationPoint, epsilon: f64, group: &SymmetryGroup, n_samples: usize) -> Result<BoundaryShape> {
    if !(epsilon.abs() < 0.5) {
        return Err(Error::Domain(format!("|epsilon| must be below 0.5, got {epsilon}")));
    }
    let basis = invariant_basis(group, point.degree)?;
    let zeta = basis
        .first()
        .ok_or_else(|| Error::InvalidParams(format!("degree {} has no invariant harmonics", point.degree)))?;
    let n = group.ambient_n;
    let mut qdeg = point.degree.max(1);
    let quad = loop {
        let q = sphere_quadrature(n, qdeg)?;
        if q.len() >= n_samples || qdeg > 400 {
            break q;
        }
        qdeg += 2;
    };
    let base = point.radius_star;
    let values: Vec<f64> = quad.points.par_iter().map(|x| zeta.eval(x)).collect();
    let radii: Vec<f64> = values.iter().map(|z| base * (1.0 + epsilon * z)).collect();
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::Domain(format!("epsilon {epsilon} gives a nonpositive radius {r}")));
    }

    let elements = &zeta.table().elements;
    let stride = elements.len().div_ceil(MAX_CHECKED_ELEMENTS).max(1);
    let invariance_defect = quad
        .points
        .par_iter()
        .zip(&values)
        .map(|(x, &v)| {
            elements
                .iter()
                .step_by(stride)
                .map(|g| (zeta.eval(&g.apply(x)) - v).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let mean = quad
        .weights
        .iter()
        .zip(&radii)
        .map(|(w, r)| w * (r / base - 1.0))
        .sum::<f64>()
        / sphere_area(n);
    let mean_defect = mean.abs();
    if invariance_defect > SHAPE_TOL || mean_defect > SHAPE_TOL {
        return Err(Error::Consistency(format!(
            "perturbed domain fails its checks: invariance {invariance_defect:e}, mean {mean_defect:e}"
        )));
    }
    let mut coefficients = vec![0.0; basis.len()];
    coefficients[0] = 1.0;
    Ok(BoundaryShape {
        base_radius: base,
        epsilon,
        degree: point.degree,
        coefficients,
        points: quad.points,
        weights: quad.weights,
        radii,
        invariance_defect,
        mean_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_arithmetic() {
        assert_eq!(radius_from_lambda(0.25).unwrap(), 2.0);
        assert_eq!(radius_from_lambda(1.0).unwrap(), 1.0);
        assert!(radius_from_lambda(0.0).is_err());
    }
}
