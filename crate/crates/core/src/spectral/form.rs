//! Conservative (flux-form) discretization of the radial operator
//! `-λ S^{-m}(S^m ψ')' + (1 - p u^{p-1} + λμ/S²) ψ`, `m = N - 1`,
//! `S = S_λ` the warping function at `u.lambda`, with a
//! lumped mass matrix and a Robin closure `ψ' = -κψ` at the last node.
//!
//! The same weights define the discrete quadratic form, so for a discrete
//! eigenvector the Rayleigh quotient reproduces the eigenvalue to rounding.

use crate::error::{Error, Result};
use crate::linalg::LaplacianPencil;
use crate::model::{ModelParams, RadialGrid, RadialProfile, Warp};

#[derive(Debug, Clone)]
pub struct RadialForm {
    pub nodes: Vec<f64>,
    /// `λ S^m(r_{i+1/2}) / h_i`.
    pub edge: Vec<f64>,
    /// Lumped `S^m(r_i)` times the dual cell length.
    pub mass: Vec<f64>,
    /// `1 - p u^{p-1}(r_i) + λμ / S²(r_i)`.
    pub potential: Vec<f64>,
    /// `λ κ S^m(r_max)`.
    pub robin: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub weight_power: i32,
    pub warp: Warp,
}

impl RadialForm {
    /// Assemble on `grid` for the ground state `u` (at `u.lambda`) and the
    /// angular eigenvalue `mu`. `grid` must start at a positive radius.
    pub fn new(grid: &RadialGrid, u: &RadialProfile, params: &ModelParams, mu: f64, kappa: f64) -> Result<Self> {
        let nodes = grid.nodes().to_vec();
        if !(nodes[0] > 0.0) {
            return Err(Error::Domain("radial form needs a positive inner radius".into()));
        }
        let lambda = u.lambda;
        let warp = Warp::new(lambda)?;
        let m = params.weight_power();
        let n = nodes.len();
        let weight = |r: f64| warp.weight(r, m);
        let edge: Vec<f64> = nodes
            .windows(2)
            .map(|w| lambda * weight(0.5 * (w[0] + w[1])) / (w[1] - w[0]))
            .collect();
        let mass: Vec<f64> = (0..n)
            .map(|i| {
                let left = if i > 0 { nodes[i] - nodes[i - 1] } else { 0.0 };
                let right = if i + 1 < n { nodes[i + 1] - nodes[i] } else { 0.0 };
                weight(nodes[i]) * 0.5 * (left + right)
            })
            .collect();
        let p = params.p;
        let potential: Vec<f64> = nodes
            .iter()
            .map(|&r| {
                let s = warp.s(r);
                let uv = u.eval(r).max(0.0);
                1.0 - p * uv.powf(p - 1.0) + lambda * mu / (s * s)
            })
            .collect();
        let robin = lambda * kappa * weight(nodes[n - 1]);
        Ok(RadialForm {
            nodes,
            edge,
            mass,
            potential,
            robin,
            lambda,
            kappa,
            weight_power: m,
            warp,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Discrete `∫ S^m (λψ'² + Vψ²) dr` including the Robin tail term.
    pub fn energy(&self, psi: &[f64]) -> f64 {
        let n = self.len();
        let grad: f64 = self
            .edge
            .iter()
            .enumerate()
            .map(|(i, e)| e * (psi[i + 1] - psi[i]).powi(2))
            .sum();
        let pot: f64 = (0..n).map(|i| self.mass[i] * self.potential[i] * psi[i] * psi[i]).sum();
        grad + pot + self.robin * psi[n - 1] * psi[n - 1]
    }

    /// Discrete `∫ S^{m+shift} ψ φ dr` with the lumped weights.
    pub fn mass_product(&self, psi: &[f64], phi: &[f64], shift: i32) -> f64 {
        (0..self.len())
            .map(|i| self.mass[i] * self.warp.weight(self.nodes[i], shift) * psi[i] * phi[i])
            .sum()
    }

    /// Row `i` of the stiffness matrix as `(sub, diag, sup)`.
    pub fn row(&self, i: usize) -> (f64, f64, f64) {
        let n = self.len();
        let left = if i > 0 { self.edge[i - 1] } else { 0.0 };
        let right = if i + 1 < n { self.edge[i] } else { 0.0 };
        let mut d = left + right + self.mass[i] * self.potential[i];
        if i + 1 == n {
            d += self.robin;
        }
        (-left, d, -right)
    }

    /// The pencil `A - τM` on nodes `1..n` (Dirichlet at the inner
    /// boundary); the edge to node 0 enters as `left0`.
    pub fn dirichlet_pencil(&self) -> Result<LaplacianPencil> {
        let n = self.len();
        let mut q: Vec<f64> = (1..n).map(|i| self.mass[i] * self.potential[i]).collect();
        *q.last_mut().expect("at least two nodes") += self.robin;
        LaplacianPencil::new(self.edge[0], self.edge[1..].to_vec(), q, self.mass[1..].to_vec())
    }

    /// Derivatives at the nodes: one-sided second-order differences at the
    /// inner node, central differences inside, the Robin slope at the end.
    pub fn derivatives(&self, psi: &[f64]) -> Vec<f64> {
        let n = self.len();
        let r = &self.nodes;
        (0..n)
            .map(|i| {
                if i == 0 {
                    one_sided_derivative(r, psi)
                } else if i + 1 == n {
                    -self.kappa * psi[i]
                } else {
                    let (h0, h1) = (r[i] - r[i - 1], r[i + 1] - r[i]);
                    (psi[i + 1] * h0 * h0 - psi[i - 1] * h1 * h1 + psi[i] * (h1 * h1 - h0 * h0))
                        / (h0 * h1 * (h0 + h1))
                }
            })
            .collect()
    }
}

/// Second-order one-sided derivative at the first node.
pub fn one_sided_derivative(r: &[f64], psi: &[f64]) -> f64 {
    let (h0, h1) = (r[1] - r[0], r[2] - r[1]);
    let s = h0 + h1;
    -(2.0 * h0 + h1) / (h0 * s) * psi[0] + s / (h0 * h1) * psi[1] - h0 / (h1 * s) * psi[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_sided_stencil_is_exact_for_quadratics() {
        let r = [1.0, 1.1, 1.25];
        let f = |x: f64| 3.0 * x * x - 2.0 * x + 0.5;
        let psi: Vec<f64> = r.iter().map(|&x| f(x)).collect();
        assert!((one_sided_derivative(&r, &psi) - (6.0 - 2.0)).abs() < 1e-12);
        let uniform = [1.0, 1.1, 1.2];
        let psi: Vec<f64> = uniform.iter().map(|&x| f(x)).collect();
        let classic = (-3.0 * psi[0] + 4.0 * psi[1] - psi[2]) / 0.2;
        assert!((one_sided_derivative(&uniform, &psi) - classic).abs() < 1e-12);
    }
}
