//! Element tables of the finite orthogonal groups: dihedral groups in the
//! plane, the polyhedral groups in space and the rotation group of the
//! 600-cell acting on the 3-sphere by `x ↦ l x r̄`.

use crate::error::{Error, Result};

/// Row-major `n × n` orthogonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Orthogonal {
    pub n: usize,
    pub m: Vec<f64>,
}

impl Orthogonal {
    pub fn identity(n: usize) -> Self {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        Orthogonal { n, m }
    }

    pub fn from_rows(n: usize, m: Vec<f64>) -> Self {
        debug_assert_eq!(m.len(), n * n);
        Orthogonal { n, m }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| self.m[i * n + j] * x[j]).sum()).collect()
    }

    pub fn compose(&self, other: &Orthogonal) -> Orthogonal {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = (0..n).map(|k| self.m[i * n + k] * other.m[k * n + j]).sum();
            }
        }
        Orthogonal { n, m }
    }

    pub fn negated(&self) -> Orthogonal {
        Orthogonal {
            n: self.n,
            m: self.m.iter().map(|v| -v).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.m[i * self.n + i]).sum()
    }

    pub fn determinant(&self) -> f64 {
        match self.n {
            1 => self.m[0],
            2 => self.m[0] * self.m[3] - self.m[1] * self.m[2],
            3 => {
                let a = &self.m;
                a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                    + a[2] * (a[3] * a[7] - a[4] * a[6])
            }
            _ => {
                let mat = nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.m);
                mat.determinant()
            }
        }
    }

    fn close_to(&self, other: &Orthogonal) -> bool {
        self.m.iter().zip(&other.m).all(|(a, b)| (a - b).abs() < 1e-9)
    }
}

/// Closure of a generating set under composition.
pub fn closure(generators: &[Orthogonal], limit: usize) -> Result<Vec<Orthogonal>> {
    let n = generators[0].n;
    let mut elems = vec![Orthogonal::identity(n)];
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for e in &frontier {
            for g in generators {
                let c = g.compose(e);
                if !elems.iter().any(|x| x.close_to(&c)) {
                    elems.push(c.clone());
                    next.push(c);
                    if elems.len() > limit {
                        return Err(Error::Config("group closure exceeded the expected order".into()));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(elems)
}

fn rotation_about(axis: [f64; 3], angle: f64) -> Orthogonal {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    Orthogonal::from_rows(
        3,
        vec![
            t * x * x + c,
            t * x * y - s * z,
            t * x * z + s * y,
            t * x * y + s * z,
            t * y * y + c,
            t * y * z - s * x,
            t * x * z - s * y,
            t * y * z + s * x,
            t * z * z + c,
        ],
    )
}

fn cyclic_permutation() -> Orthogonal {
    // (x, y, z) ↦ (z, x, y): rotation by 2π/3 about (1, 1, 1).
    Orthogonal::from_rows(3, vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0])
}

pub fn tetrahedral_rotations() -> Result<Vec<Orthogonal>> {
    let half_turn = Orthogonal::from_rows(3, vec![-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
    closure(&[cyclic_permutation(), half_turn], 12)
}

pub fn octahedral_rotations() -> Result<Vec<Orthogonal>> {
    let quarter = rotation_about([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2);
    closure(&[cyclic_permutation(), quarter], 24)
}

pub fn icosahedral_rotations() -> Result<Vec<Orthogonal>> {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let fifth = rotation_about([0.0, 1.0, phi], 2.0 * std::f64::consts::PI / 5.0);
    closure(&[cyclic_permutation(), fifth], 60)
}

/// The full tetrahedral group: rotations together with the mirror
/// `(x, y, z) ↦ (y, x, z)` composed with them.
pub fn tetrahedral_full() -> Result<Vec<Orthogonal>> {
    let rot = tetrahedral_rotations()?;
    let mirror = Orthogonal::from_rows(3, vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let mut all = rot.clone();
    all.extend(rot.iter().map(|g| mirror.compose(g)));
    Ok(all)
}

/// Rotations together with their negatives (central inversion).
pub fn with_inversion(rot: Vec<Orthogonal>) -> Vec<Orthogonal> {
    let mut all = rot.clone();
    all.extend(rot.iter().map(Orthogonal::negated));
    all
}

/// `D_m` in the plane: `m` rotations and `m` reflections.
pub fn dihedral(m: usize) -> Vec<Orthogonal> {
    let mut out = Vec::with_capacity(2 * m);
    for k in 0..m {
        let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let (s, c) = a.sin_cos();
        out.push(Orthogonal::from_rows(2, vec![c, -s, s, c]));
    }
    for k in 0..m {
        let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let (s, c) = a.sin_cos();
        out.push(Orthogonal::from_rows(2, vec![c, s, s, -c]));
    }
    out
}

pub type Quaternion = [f64; 4];

pub fn quat_mul(a: &Quaternion, b: &Quaternion) -> Quaternion {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

pub fn quat_conj(a: &Quaternion) -> Quaternion {
    [a[0], -a[1], -a[2], -a[3]]
}

/// The binary icosahedral group: 120 unit quaternions.
pub fn binary_icosahedral() -> Result<Vec<Quaternion>> {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let gens: [Quaternion; 2] = [[0.5, 0.5, 0.5, 0.5], [0.5 * phi, 0.5 / phi, 0.5, 0.0]];
    let mut elems: Vec<Quaternion> = vec![[1.0, 0.0, 0.0, 0.0]];
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for e in &frontier {
            for g in &gens {
                let c = quat_mul(g, e);
                if !elems.iter().any(|x| x.iter().zip(&c).all(|(a, b)| (a - b).abs() < 1e-9)) {
                    elems.push(c);
                    next.push(c);
                    if elems.len() > 120 {
                        return Err(Error::Config("binary icosahedral closure overflowed".into()));
                    }
                }
            }
        }
        frontier = next;
    }
    if elems.len() != 120 {
        return Err(Error::Config(format!("binary icosahedral group has {} elements", elems.len())));
    }
    Ok(elems)
}

/// Matrix of `x ↦ l x r̄` on `R⁴ = H`.
pub fn quaternion_pair_matrix(l: &Quaternion, r: &Quaternion) -> Orthogonal {
    let rc = quat_conj(r);
    let mut m = vec![0.0; 16];
    for j in 0..4 {
        let mut e = [0.0; 4];
        e[j] = 1.0;
        let col = quat_mul(&quat_mul(l, &e), &rc);
        for i in 0..4 {
            m[i * 4 + j] = col[i];
        }
    }
    Orthogonal::from_rows(4, m)
}

/// Pairs `(l, r)` of the binary icosahedral group modulo `(l, r) ~ (-l, -r)`:
/// the 7200 rotations of the 600-cell.
pub fn hyper_icosahedral_pairs() -> Result<Vec<(Quaternion, Quaternion)>> {
    let q = binary_icosahedral()?;
    let mut pairs = Vec::with_capacity(7200);
    for l in &q {
        // Representative with the first nonzero component of l positive.
        let first = l.iter().copied().find(|v| v.abs() > 1e-12).unwrap_or(1.0);
        if first < 0.0 {
            continue;
        }
        for r in &q {
            pairs.push((*l, *r));
        }
    }
    if pairs.len() != 7200 {
        return Err(Error::Config(format!("600-cell rotation group has {} elements", pairs.len())));
    }
    Ok(pairs)
}
