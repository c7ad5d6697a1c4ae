//! Randomized search for negative values of `Q̃_λ` over finite spans of
//! radial bumps times invariant harmonics, with the trace and orthogonality
//! constraints imposed on the radial (degree 0) part by projection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{sphere_eigenvalue, GroupSpectrum};
use crate::model::{ModelParams, RadialGrid, RadialProfile};
use crate::spectral::inequalities::BumpSum;
use crate::spectral::{boundary_coefficient, closure_exponent, radial_spectrum_on, RadialForm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSearch {
    pub lambda: f64,
    pub trials: usize,
    /// Smallest `Q̃(ψ) / ∫S^{N-1}ψ²` seen.
    pub min_ratio: f64,
    pub negative_count: usize,
}

/// Evaluate `Q̃_λ` on `trials` random functions
/// `ψ₀(r) + Σ_k ψ_k(r) Σ_j a_{kj} ζ_{kj}(θ)` where `ψ₀` vanishes at `r = 1`
/// and is orthogonal to the ground eigenfunction, and the `ψ_k` are bump
/// sums over the first `modes` entries of `spectrum`.
pub fn constrained_trial_search(
    u: &RadialProfile,
    params: &ModelParams,
    spectrum: &GroupSpectrum,
    modes: usize,
    trials: usize,
    intervals: usize,
    seed: u64,
) -> Result<TrialSearch> {
    if spectrum.n != params.n {
        return Err(Error::Incompatible("group dimension differs from N".into()));
    }
    if trials == 0 || modes == 0 {
        return Err(Error::InvalidParams("need at least one trial and one mode".into()));
    }
    let cfg = crate::model::NumericsConfig::default();
    let ground = radial_spectrum_on(u, params, 1, &cfg, intervals)?.remove(0).eigenfunction;
    let grid = ground.grid.clone();
    let kappa = closure_exponent(params, u.lambda, 0.0);
    let radial_form = RadialForm::new(&grid, u, params, 0.0, kappa)?;
    let entries: Vec<_> = spectrum.entries.iter().take(modes).collect();
    let forms = entries
        .iter()
        .map(|e| RadialForm::new(&grid, u, params, sphere_eigenvalue(e.i, params.n), kappa))
        .collect::<Result<Vec<_>>>()?;
    let bc = boundary_coefficient(params, u.lambda);
    let z = &ground.values;
    let zz = radial_form.mass_product(z, z, 0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut negative_count = 0;
    for _ in 0..trials {
        let mut value = 0.0;
        let mut mass = 0.0;
        if rng.random_bool(0.5) {
            let mut psi = sample(&BumpSum::random(&mut rng, 1.5), &grid);
            psi[0] = 0.0;
            let c = radial_form.mass_product(&psi, z, 0) / zz;
            psi.iter_mut().zip(z).for_each(|(p, zv)| *p -= c * zv);
            value += radial_form.energy(&psi);
            mass += radial_form.mass_product(&psi, &psi, 0);
        }
        for (entry, form) in entries.iter().zip(&forms) {
            let psi = sample(&BumpSum::random(&mut rng, 1.0), &grid);
            let coeffs: Vec<f64> = (0..entry.m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a2: f64 = coeffs.iter().map(|c| c * c).sum();
            value += a2 * (form.energy(&psi) - bc * psi[0] * psi[0]);
            mass += a2 * form.mass_product(&psi, &psi, 0);
        }
        if mass <= 0.0 {
            continue;
        }
        let ratio = value / mass;
        min_ratio = min_ratio.min(ratio);
        if value < 0.0 {
            negative_count += 1;
        }
    }
    Ok(TrialSearch {
        lambda: u.lambda,
        trials,
        min_ratio,
        negative_count,
    })
}

fn sample(g: &BumpSum, grid: &RadialGrid) -> Vec<f64> {
    let mut v: Vec<f64> = grid.nodes().iter().map(|&r| g.eval(r).0).collect();
    let n = v.len();
    v[n - 1] = 0.0;
    v
}
