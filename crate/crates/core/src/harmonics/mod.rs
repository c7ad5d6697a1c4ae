//! Spherical harmonics restricted to finite symmetry groups: invariant
//! multiplicities by character averaging, an independent rank oracle built
//! from group-averaged zonal kernels, invariant bases, and the `(G1)` test.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod groups;
pub mod quadrature;

use groups::{Orthogonal, Quaternion};
pub use quadrature::{sphere_area, sphere_quadrature, SphereQuadrature};

/// Singular values above this count toward the invariant rank.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "order")]
pub enum GroupKind {
    Dihedral(usize),
    Tetrahedral,
    Octahedral,
    Icosahedral,
    HyperIcosahedral,
    /// The trivial group.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetryGroup {
    pub kind: GroupKind,
    pub ambient_n: usize,
    /// For the polyhedral groups in `R³`: drop the improper isometries.
    #[serde(default)]
    pub rotations_only: bool,
}

impl fmt::Display for SymmetryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GroupKind::Dihedral(m) => format!("dihedral({m})"),
            GroupKind::Tetrahedral => "tetrahedral".into(),
            GroupKind::Octahedral => "octahedral".into(),
            GroupKind::Icosahedral => "icosahedral".into(),
            GroupKind::HyperIcosahedral => "hyper-icosahedral".into(),
            GroupKind::Full => "trivial".into(),
        };
        let suffix = if self.rotations_only { ", rotations" } else { "" };
        write!(f, "{name} (N={}{suffix})", self.ambient_n)
    }
}

impl SymmetryGroup {
    pub fn new(kind: GroupKind, ambient_n: usize) -> Result<Self> {
        let g = SymmetryGroup {
            kind,
            ambient_n,
            rotations_only: false,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn rotations(kind: GroupKind, ambient_n: usize) -> Result<Self> {
        let g = SymmetryGroup {
            kind,
            ambient_n,
            rotations_only: true,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            GroupKind::Dihedral(m) => self.ambient_n == 2 && m >= 1,
            GroupKind::Tetrahedral | GroupKind::Octahedral | GroupKind::Icosahedral => self.ambient_n == 3,
            GroupKind::HyperIcosahedral => self.ambient_n == 4,
            GroupKind::Full => self.ambient_n >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("{:?} is not available in dimension {}", self.kind, self.ambient_n)))
        }
    }

    /// The element table.
    pub fn table(&self) -> Result<GroupTable> {
        self.validate()?;
        let n = self.ambient_n;
        let (elements, pairs) = match self.kind {
            GroupKind::Full => (vec![Orthogonal::identity(n)], None),
            GroupKind::Dihedral(m) => (groups::dihedral(m), None),
            GroupKind::Tetrahedral => {
                if self.rotations_only {
                    (groups::tetrahedral_rotations()?, None)
                } else {
                    (groups::tetrahedral_full()?, None)
                }
            }
            GroupKind::Octahedral => {
                let rot = groups::octahedral_rotations()?;
                (if self.rotations_only { rot } else { groups::with_inversion(rot) }, None)
            }
            GroupKind::Icosahedral => {
                let rot = groups::icosahedral_rotations()?;
                (if self.rotations_only { rot } else { groups::with_inversion(rot) }, None)
            }
            GroupKind::HyperIcosahedral => {
                let pairs = groups::hyper_icosahedral_pairs()?;
                let mats = pairs.iter().map(|(l, r)| groups::quaternion_pair_matrix(l, r)).collect();
                (mats, Some(pairs))
            }
        };
        Ok(GroupTable {
            group: *self,
            elements,
            pairs,
        })
    }
}

/// Explicit group elements (and, for the 600-cell group, the quaternion pairs).
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub group: SymmetryGroup,
    pub elements: Vec<Orthogonal>,
    pub pairs: Option<Vec<(Quaternion, Quaternion)>>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Character-averaged dimension of the invariant degree-`k` harmonics.
    pub fn character_multiplicity(&self, k: usize) -> Result<usize> {
        let n = self.group.ambient_n;
        let avg = match (self.group.kind, n) {
            (GroupKind::Full, _) => harmonic_dimension(k, n) as f64,
            (GroupKind::HyperIcosahedral, _) => {
                let q = groups::binary_icosahedral()?;
                let s: f64 = q.iter().map(|x| chebyshev_u(k, x[0])).sum::<f64>() / q.len() as f64;
                s * s
            }
            (_, 2) => {
                let sum: f64 = self
                    .elements
                    .iter()
                    .map(|g| {
                        if k == 0 {
                            1.0
                        } else if g.determinant() > 0.0 {
                            2.0 * (k as f64 * g.m[2].atan2(g.m[0])).cos()
                        } else {
                            0.0
                        }
                    })
                    .sum();
                sum / self.order() as f64
            }
            (_, 3) => {
                let sum: f64 = self
                    .elements
                    .iter()
                    .map(|g| {
                        let (rot, sign) = if g.determinant() > 0.0 {
                            (g.clone(), 1.0)
                        } else {
                            (g.negated(), if k % 2 == 0 { 1.0 } else { -1.0 })
                        };
                        let cos_phi = ((rot.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
                        sign * so3_character(k, cos_phi.acos())
                    })
                    .sum();
                sum / self.order() as f64
            }
            _ => return Err(Error::Config(format!("no character formula for {}", self.group))),
        };
        let m = avg.round();
        if (avg - m).abs() > 1e-6 || m < 0.0 {
            return Err(Error::Consistency(format!("character average {avg} is not a nonnegative integer")));
        }
        Ok(m as usize)
    }

    /// `(1/|G|) Σ_g Ẑ_k(⟨g x, y⟩)`, the averaged zonal kernel normalized so
    /// that `Ẑ_k(1) = 1`.
    pub fn averaged_zonal(&self, k: usize, x: &[f64], y: &[f64]) -> f64 {
        let n = self.group.ambient_n;
        let z1 = zonal_unnormalized(k, n, 1.0);
        let sum: f64 = self
            .elements
            .iter()
            .map(|g| {
                let gx = g.apply(x);
                let t: f64 = gx.iter().zip(y).map(|(a, b)| a * b).sum();
                zonal_unnormalized(k, n, t.clamp(-1.0, 1.0))
            })
            .sum();
        sum / (self.order() as f64 * z1)
    }

    /// Rank of the group-averaged degree-`k` harmonics, sampled at random
    /// points. By the addition theorem, the averaged kernel matrix
    /// `K(x_i, x_j)` equals `Σ_a (P Y_a)(x_i) Y_a(x_j)` for any orthonormal
    /// basis `Y_a`, so its rank is the dimension of the averaged span. The
    /// sample count is doubled until it exceeds the rank by a margin.
    pub fn projection_rank(&self, k: usize, seed: u64) -> Result<usize> {
        let n = self.group.ambient_n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut count = 8usize;
        let cap = 2 * harmonic_dimension(k, n) + 16;
        loop {
            let pts: Vec<Vec<f64>> = (0..count).map(|_| random_unit(&mut rng, n)).collect();
            let mat = DMatrix::from_fn(count, count, |i, j| self.averaged_zonal(k, &pts[i], &pts[j]));
            let sv = mat.svd(false, false).singular_values;
            let rank = sv.iter().filter(|&&s| s > RANK_TOL).count();
            if rank + 8 <= count || count >= cap {
                return Ok(rank);
            }
            count *= 2;
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `Σ_{j=-k}^{k} e^{ijφ} = sin((k+½)φ)/sin(φ/2)`.
fn so3_character(k: usize, phi: f64) -> f64 {
    (1..=k).map(|j| 2.0 * (j as f64 * phi).cos()).sum::<f64>() + 1.0
}

/// Chebyshev polynomial of the second kind `U_k(t)`.
fn chebyshev_u(k: usize, t: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * t);
    if k == 0 {
        return 1.0;
    }
    for _ in 1..k {
        let c = 2.0 * t * b - a;
        a = b;
        b = c;
    }
    b
}

/// Zonal polynomial of degree `k` on `S^{n-1}` (Gegenbauer `C_k^{(n-2)/2}`,
/// Chebyshev `T_k` for `n = 2`), not normalized.
fn zonal_unnormalized(k: usize, n: usize, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if n == 2 {
        let (mut a, mut b) = (1.0, t);
        for _ in 1..k {
            let c = 2.0 * t * b - a;
            a = b;
            b = c;
        }
        return b;
    }
    let alpha = (n as f64 - 2.0) / 2.0;
    let (mut a, mut b) = (1.0, 2.0 * alpha * t);
    for j in 2..=k {
        let jf = j as f64;
        let c = (2.0 * t * (jf + alpha - 1.0) * b - (jf + 2.0 * alpha - 2.0) * a) / jf;
        a = b;
        b = c;
    }
    b
}

/// Reproducing kernel of degree-`k` harmonics on `S^{n-1}` (surface measure).
pub fn zonal_kernel(k: usize, n: usize, t: f64) -> f64 {
    harmonic_dimension(k, n) as f64 / sphere_area(n) * zonal_unnormalized(k, n, t) / zonal_unnormalized(k, n, 1.0)
}

/// `k(k + N - 2)`.
pub fn sphere_eigenvalue(k: usize, n: usize) -> f64 {
    (k * (k + n - 2)) as f64
}

/// Dimension of degree-`k` spherical harmonics on `S^{n-1}`.
pub fn harmonic_dimension(k: usize, n: usize) -> usize {
    if n == 1 {
        return usize::from(k <= 1);
    }
    let binom = |a: usize, b: usize| -> usize {
        if b > a {
            return 0;
        }
        (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128) as usize
    };
    let all = binom(k + n - 1, n - 1);
    let lower = if k >= 2 { binom(k + n - 3, n - 1) } else { 0 };
    all - lower
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub i: usize,
    pub m: usize,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpectrum {
    pub group: SymmetryGroup,
    #[serde(rename = "N")]
    pub n: usize,
    pub entries: Vec<SpectrumEntry>,
}

impl GroupSpectrum {
    pub fn first(&self) -> Option<&SpectrumEntry> {
        self.entries.first()
    }

    pub fn entry(&self, degree: usize) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.i == degree)
    }
}

/// Invariant degrees `1..=k_max` with their multiplicities.
pub fn group_restricted_spectrum(group: &SymmetryGroup, k_max: usize) -> Result<GroupSpectrum> {
    if k_max == 0 {
        return Err(Error::InvalidParams("k_max must be at least 1".into()));
    }
    let table = group.table()?;
    let mut entries = Vec::new();
    for k in 1..=k_max {
        let m = table.character_multiplicity(k)?;
        if m > 0 {
            entries.push(SpectrumEntry {
                i: k,
                m,
                mu: sphere_eigenvalue(k, group.ambient_n),
            });
        }
    }
    Ok(GroupSpectrum {
        group: *group,
        n: group.ambient_n,
        entries,
    })
}

/// Rank of the group-averaged span of degree-`degree` harmonics.
pub fn invariant_projection_rank(group: &SymmetryGroup, degree: usize) -> Result<usize> {
    group.table()?.projection_rank(degree, 0x5eed + degree as u64)
}

/// `(2 - N + √((N-2)² + (16/9)(N+2)(N-1)))/2`.
pub fn g1_threshold(n: usize) -> f64 {
    let nf = n as f64;
    (2.0 - nf + ((nf - 2.0).powi(2) + 16.0 / 9.0 * (nf + 2.0) * (nf - 1.0)).sqrt()) / 2.0
}

/// `(4/9)(N+2)(N-1)`, the lower bound on `μ_{i_1}` implied by `(G1)`.
pub fn g1_mu_bound(n: usize) -> f64 {
    let nf = n as f64;
    4.0 * (nf + 2.0) * (nf - 1.0) / 9.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G1Report {
    pub satisfied: bool,
    pub i1: usize,
    pub m1: usize,
    pub m1_odd: bool,
    pub threshold: f64,
    /// `i_1 > threshold`.
    pub above_threshold_strict: bool,
    /// `i_1 ≥ threshold`.
    pub above_threshold_non_strict: bool,
    pub mu_i1: f64,
    pub mu_bound: f64,
    pub mu_bound_holds: bool,
}

/// `(G1)`: `m_1` odd and `i_1` strictly above the threshold.
pub fn check_g1(spec: &GroupSpectrum) -> Result<G1Report> {
    let first = spec
        .first()
        .ok_or_else(|| Error::Precondition("group spectrum is empty".into()))?;
    let thr = g1_threshold(spec.n);
    let i1 = first.i as f64;
    let m1_odd = first.m % 2 == 1;
    let strict = i1 > thr;
    let mu_bound = g1_mu_bound(spec.n);
    Ok(G1Report {
        satisfied: m1_odd && strict,
        i1: first.i,
        m1: first.m,
        m1_odd,
        threshold: thr,
        above_threshold_strict: strict,
        above_threshold_non_strict: i1 >= thr,
        mu_i1: first.mu,
        mu_bound,
        mu_bound_holds: first.mu >= mu_bound,
    })
}

/// An orthonormal basis of the invariant degree-`k` harmonics, each element
/// a combination of averaged kernels `K(·, y_b)`.
#[derive(Debug, Clone)]
pub struct InvariantHarmonic {
    table: std::sync::Arc<GroupTable>,
    pub degree: usize,
    pub poles: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl InvariantHarmonic {
    /// Value at a unit vector; unit `L²` norm in surface measure.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.table.group.ambient_n;
        let scale = zonal_kernel(self.degree, n, 1.0);
        self.poles
            .iter()
            .zip(&self.weights)
            .map(|(y, w)| w * scale * self.table.averaged_zonal(self.degree, x, y))
            .sum()
    }

    pub fn table(&self) -> &GroupTable {
        &self.table
    }
}

/// Fixed, deterministic pole sequence on `S^{n-1}`.
fn pole_sequence(n: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9013 + n as u64);
    (0..count).map(|_| random_unit(&mut rng, n)).collect()
}

/// Orthonormal invariant basis of degree `k`, built from averaged kernels
/// `K(·, y_b)` at a fixed pole sequence. Poles are taken in order when they
/// add a new direction (pivoted Cholesky on the exact Gram matrix
/// `⟨K(·,y_a), K(·,y_b)⟩ = K(y_a, y_b)`), so the first basis element is the
/// normalized kernel at the first pole where it does not vanish.
pub fn invariant_basis(group: &SymmetryGroup, k: usize) -> Result<Vec<InvariantHarmonic>> {
    let table = std::sync::Arc::new(group.table()?);
    let m = table.character_multiplicity(k)?;
    let n = group.ambient_n;
    if m == 0 {
        return Ok(Vec::new());
    }
    let scale = zonal_kernel(k, n, 1.0);
    let kernel = |a: &[f64], b: &[f64]| scale * table.averaged_zonal(k, a, b);
    let poles = pole_sequence(n, 4 * m + 16);
    // Rows of the Cholesky factor L for the accepted poles.
    let mut used: Vec<usize> = Vec::new();
    let mut l_rows: Vec<Vec<f64>> = Vec::new();
    for (idx, y) in poles.iter().enumerate() {
        let g: Vec<f64> = used.iter().map(|&j| kernel(&poles[j], y)).collect();
        let mut row = vec![0.0; used.len()];
        for a in 0..used.len() {
            let s: f64 = (0..a).map(|b| l_rows[a][b] * row[b]).sum();
            row[a] = (g[a] - s) / l_rows[a][a];
        }
        let d = kernel(y, y) - row.iter().map(|v| v * v).sum::<f64>();
        if d <= 1e-10 * scale * scale {
            continue;
        }
        row.push(d.sqrt());
        used.push(idx);
        l_rows.push(row);
        if used.len() == m {
            break;
        }
    }
    if used.len() != m {
        return Err(Error::Consistency(format!(
            "found {} invariant directions at degree {k}, expected {m}",
            used.len()
        )));
    }
    // e_a = Σ_b (L⁻¹)_{ab} K(·, y_b).
    let lmat = DMatrix::from_fn(m, m, |i, j| if j <= i { l_rows[i][j] } else { 0.0 });
    let linv = lmat
        .try_inverse()
        .ok_or_else(|| Error::Consistency("singular invariant Gram factor".into()))?;
    let used_poles: Vec<Vec<f64>> = used.iter().map(|&j| poles[j].clone()).collect();
    Ok((0..m)
        .map(|a| InvariantHarmonic {
            table: std::sync::Arc::clone(&table),
            degree: k,
            poles: used_poles.clone(),
            weights: (0..m).map(|b| linv[(a, b)]).collect(),
        })
        .collect())
}
