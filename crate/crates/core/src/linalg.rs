//! Tridiagonal linear algebra and Gauss quadrature nodes.

use crate::error::{Error, Result};

/// Solve a general tridiagonal system by Gaussian elimination with partial
/// pivoting. `sub[i]` couples rows `i+1` and `i`, `sup[i]` rows `i` and `i+1`.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || sub.len() + 1 != n || sup.len() + 1 != n || rhs.len() != n {
        return Err(Error::Incompatible("tridiagonal dimensions do not match".into()));
    }
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut dl = sub.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    // Row magnitudes; weighted problems vary over many decades.
    let row_scale: Vec<f64> = (0..n)
        .map(|i| {
            let l = if i > 0 { sub[i - 1].abs() } else { 0.0 };
            let r = if i + 1 < n { sup[i].abs() } else { 0.0 };
            l.max(r).max(diag[i].abs())
        })
        .collect();
    for i in 0..n - 1 {
        if dl[i].abs() > d[i].abs() {
            // swap rows i and i+1
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - fact * d[i + 1];
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            b.swap(i, i + 1);
            b[i + 1] -= fact * b[i];
        } else {
            if d[i] == 0.0 {
                return Err(Error::Degenerate(format!("zero pivot at row {i}")));
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        }
    }
    let singular = d.iter().enumerate().any(|(i, v)| {
        let near = row_scale[i].max(row_scale[(i + 1).min(n - 1)]);
        v.abs() <= f64::EPSILON * 1e-3 * near
    });
    if singular {
        return Err(Error::Degenerate("singular tridiagonal matrix".into()));
    }
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

/// Solve `A x = rhs` for `A = (weighted path Laplacian) + diag(q)`: row `i`
/// has off-diagonals `-edges[i-1]`, `-edges[i]` and diagonal
/// `edges[i-1] + edges[i] + q[i]`, where row 0 uses `left0` (an edge to a
/// fixed node) in place of `edges[-1]` and the last row has no right edge.
///
/// Elimination carries the pivot excess `s_i = d_i' - edges[i]` instead of
/// the pivot, so `q` is never added to and then recovered from the much
/// larger edge weights. Without pivoting; meant for positive definite `A`.
pub fn solve_laplacian_plus_diagonal(left0: f64, edges: &[f64], q: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = q.len();
    if n == 0 || edges.len() + 1 != n || rhs.len() != n {
        return Err(Error::Incompatible("laplacian system dimensions do not match".into()));
    }
    let right = |i: usize| if i + 1 < n { edges[i] } else { 0.0 };
    let mut pivot = vec![0.0; n];
    let mut y = rhs.to_vec();
    let mut s = q[0] + left0;
    for i in 0..n {
        if i > 0 {
            let e = edges[i - 1];
            s = q[i] + e * (s / pivot[i - 1]);
            y[i] += e * (y[i - 1] / pivot[i - 1]);
        }
        pivot[i] = right(i) + s;
        if !(pivot[i].is_finite() && pivot[i] != 0.0) {
            return Err(Error::Degenerate(format!("zero pivot at row {i}")));
        }
    }
    let mut x = vec![0.0; n];
    x[n - 1] = y[n - 1] / pivot[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (y[i] + edges[i] * x[i + 1]) / pivot[i];
    }
    Ok(x)
}

/// The pencil `A - τM`, `A` a weighted path Laplacian plus `diag(q)` as in
/// [`solve_laplacian_plus_diagonal`] and `M = diag(mass)` positive.
///
/// Sturm counts and solves use the pivot-excess recursion, so their
/// accuracy is set by `q - τM` and not by the edge weights, which on graded
/// grids exceed it by many orders of magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianPencil {
    pub left0: f64,
    pub edges: Vec<f64>,
    pub q: Vec<f64>,
    pub mass: Vec<f64>,
}

impl LaplacianPencil {
    pub fn new(left0: f64, edges: Vec<f64>, q: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        let n = q.len();
        if n == 0 || edges.len() + 1 != n || mass.len() != n {
            return Err(Error::Incompatible("pencil dimensions do not match".into()));
        }
        if mass.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::Domain("pencil mass must be positive".into()));
        }
        Ok(LaplacianPencil { left0, edges, q, mass })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    fn shifted(&self, tau: f64) -> Vec<f64> {
        self.q.iter().zip(&self.mass).map(|(q, m)| q - tau * m).collect()
    }

    /// Number of generalized eigenvalues strictly below `tau`: the negative
    /// pivots of `A - τM` (Sylvester's law of inertia).
    pub fn count_below(&self, tau: f64) -> usize {
        let n = self.len();
        let mut count = 0;
        let mut pivot_prev = 0.0;
        let mut s = self.q[0] - tau * self.mass[0] + self.left0;
        for i in 0..n {
            if i > 0 {
                let e = self.edges[i - 1];
                s = self.q[i] - tau * self.mass[i] + e * (s / pivot_prev);
            }
            let right = if i + 1 < n { self.edges[i] } else { 0.0 };
            let mut pivot = right + s;
            if pivot == 0.0 {
                pivot = -f64::EPSILON * (right.abs() + f64::MIN_POSITIVE);
            }
            if pivot < 0.0 {
                count += 1;
            }
            pivot_prev = pivot;
        }
        count
    }

    /// Gershgorin enclosure of the spectrum of `M^{-1/2} A M^{-1/2}`.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.edges[i - 1] } else { self.left0 };
            let right = if i + 1 < n { self.edges[i] } else { 0.0 };
            let d = (left + right + self.q[i]) / self.mass[i];
            let mut r = 0.0;
            if i > 0 {
                r += self.edges[i - 1].abs() / (self.mass[i] * self.mass[i - 1]).sqrt();
            }
            if i + 1 < n {
                r += right.abs() / (self.mass[i] * self.mass[i + 1]).sqrt();
            }
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest generalized eigenvalue (0-based) by bisection on
    /// [`Self::count_below`].
    pub fn eigenvalue(&self, k: usize, tol: f64) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        let width = hi - lo;
        lo -= 1e-12 * width.abs() + 1e-300;
        hi += 1e-12 * width.abs() + 1e-300;
        for _ in 0..400 {
            if hi - lo <= tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `(A - τM) z`, with the Laplacian applied to differences.
    pub fn apply_shifted(&self, z: &[f64], tau: f64) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = (self.q[i] - tau * self.mass[i]) * z[i];
                v += if i > 0 { self.edges[i - 1] * (z[i] - z[i - 1]) } else { self.left0 * z[i] };
                if i + 1 < n {
                    v += self.edges[i] * (z[i] - z[i + 1]);
                }
                v
            })
            .collect()
    }

    /// Generalized eigenvector for an accurately known eigenvalue by inverse
    /// iteration, normalized to `zᵀMz = 1`.
    pub fn eigenvector(&self, eigenvalue: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let mut shift = eigenvalue - 1e-12 * (1.0 + eigenvalue.abs());
        let mut x: Vec<f64> = self.mass.iter().map(|m| 1.0 / (m * n as f64).sqrt()).collect();
        for _ in 0..4 {
            let rhs: Vec<f64> = x.iter().zip(&self.mass).map(|(v, m)| v * m).collect();
            let y = loop {
                match solve_laplacian_plus_diagonal(self.left0, &self.edges, &self.shifted(shift), &rhs) {
                    Ok(y) => break y,
                    Err(Error::Degenerate(_)) => shift -= 1e-10 * (1.0 + eigenvalue.abs()),
                    Err(e) => return Err(e),
                }
            };
            let norm = y.iter().zip(&self.mass).map(|(v, m)| m * v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::Convergence("inverse iteration broke down".into()));
            }
            x = y.into_iter().map(|v| v / norm).collect();
        }
        Ok(x)
    }
}

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Incompatible("tridiagonal dimensions do not match".into()));
        }
        Ok(SymTridiagonal { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via the
    /// signs of the `LDLᵀ` pivots of `A - xI`).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let prev = if q == 0.0 { f64::EPSILON * (self.off[i - 1].abs() + 1e-300) } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection on the Sturm
    /// count, to absolute width `tol`.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        let width = hi - lo;
        lo -= 1e-12 * width.abs() + 1e-300;
        hi += 1e-12 * width.abs() + 1e-300;
        for _ in 0..200 {
            if hi - lo <= tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Eigenvector for an accurately known eigenvalue by inverse iteration,
    /// unit Euclidean norm.
    pub fn eigenvector(&self, eigenvalue: f64) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let (lo, hi) = self.bounds();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        let shift = eigenvalue - 1e-13 * scale;
        let diag: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..4 {
            let y = match solve_tridiagonal(&self.off, &diag, &self.off, &x) {
                Ok(y) => y,
                Err(_) => {
                    let bumped: Vec<f64> = diag.iter().map(|d| d + 1e-11 * scale).collect();
                    solve_tridiagonal(&self.off, &bumped, &self.off, &x)?
                }
            };
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::Convergence("inverse iteration broke down".into()));
            }
            x = y.into_iter().map(|v| v / norm).collect();
        }
        Ok(x)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve_with_pivoting() {
        // first pivot is zero, forcing a row swap
        let sub = [1.0, 2.0, 1.0];
        let diag = [0.0, 3.0, 1.0, 4.0];
        let sup = [2.0, 1.0, 5.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += sub[i - 1] * x[i - 1];
                }
                if i < 3 {
                    v += sup[i] * x[i + 1];
                }
                v
            })
            .collect();
        let sol = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
        for i in 0..4 {
            assert!((sol[i] - x[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn laplacian_solve_matches_general_solve() {
        let edges = [3.0, 0.5, 2.0, 7.0];
        let q = [0.1, -0.2, 0.3, 0.05, 1.0];
        let left0 = 1.5;
        let rhs = [1.0, 0.0, -2.0, 0.5, 3.0];
        let n = q.len();
        let diag: Vec<f64> = (0..n)
            .map(|i| (if i == 0 { left0 } else { edges[i - 1] }) + if i + 1 < n { edges[i] } else { 0.0 } + q[i])
            .collect();
        let off: Vec<f64> = edges.iter().map(|e| -e).collect();
        let a = solve_tridiagonal(&off, &diag, &off, &rhs).unwrap();
        let b = solve_laplacian_plus_diagonal(left0, &edges, &q, &rhs).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn pencil_matches_dense_generalized_spectrum() {
        // Edge weights spanning several decades, as on a graded grid.
        let n = 40;
        let edges: Vec<f64> = (0..n - 1).map(|i| 10f64.powf(4.0 - 0.1 * i as f64)).collect();
        let mass: Vec<f64> = (0..n).map(|i| 0.5 + 0.01 * i as f64).collect();
        let q: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.7).sin() * mass[i]).collect();
        let pencil = LaplacianPencil::new(2e4, edges.clone(), q.clone(), mass.clone()).unwrap();
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let left = if i > 0 { edges[i - 1] } else { 2e4 };
            let right = if i + 1 < n { edges[i] } else { 0.0 };
            let a = if i == j {
                left + right + q[i]
            } else if j + 1 == i {
                -edges[j]
            } else if i + 1 == j {
                -edges[i]
            } else {
                0.0
            };
            a / (mass[i] * mass[j]).sqrt()
        });
        let mut ev: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for k in [0, 1, 5, 20] {
            let tau = pencil.eigenvalue(k, 1e-14);
            assert!((tau - ev[k]).abs() < 1e-9 * (1.0 + ev[k].abs()), "k = {k}: {tau} vs {}", ev[k]);
            assert_eq!(pencil.count_below(tau - 1e-6 * (1.0 + tau.abs())), k);
            let z = pencil.eigenvector(tau).unwrap();
            let m_norm: f64 = z.iter().zip(&mass).map(|(v, m)| m * v * v).sum();
            assert!((m_norm - 1.0).abs() < 1e-12);
            let r = pencil.apply_shifted(&z, tau);
            let res = r.iter().zip(&mass).map(|(v, m)| (v / m.sqrt()).abs()).fold(0.0, f64::max);
            assert!(res < 1e-7 * (1.0 + tau.abs()), "k = {k}: residual {res}");
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let r = solve_tridiagonal(&[1.0], &[1.0, 1.0], &[1.0], &[1.0, 2.0]);
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let m = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        for k in [0, 1, 17, 49] {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            let ev = m.eigenvalue(k, 1e-14);
            assert!((ev - exact).abs() < 1e-12, "k = {k}");
            let v = m.eigenvector(ev).unwrap();
            let av = m.matvec(&v);
            let res = av.iter().zip(&v).map(|(a, b)| (a - ev * b).abs()).fold(0.0, f64::max);
            assert!(res < 1e-9);
        }
        assert_eq!(m.count_below(0.0), 0);
        assert_eq!(m.count_below(4.0), n);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((integral - 2.0 / 13.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
