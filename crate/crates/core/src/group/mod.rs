//! Groups, dual enumerations, representation matrices, and Haar quadrature.
//!
//! Two groups are realized: the torus T^n with points in [0, 2pi)^n and
//! characters e^{i k.x} indexed by k in Z^n, and SU(2) with spin-l Wigner
//! matrices indexed by 2l in N_0. The Laplacian normalization is fixed by
//! lambda_k = |k|^2 on the torus and lambda_l = l(l+1) on SU(2), so the
//! weight <xi> = (1 + lambda)^{1/2} is comparable across groups.

pub(crate) mod gauss;
pub mod su2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, C64, CMat};

pub use gauss::gauss_legendre;
pub use su2::Su2Point;

use rand_core::RngCore;

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Group {
    Torus { dim: usize },
    Su2,
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Group::Torus { dim } => write!(f, "T^{dim}"),
            Group::Su2 => write!(f, "SU(2)"),
        }
    }
}

/// One equivalence class of irreducible representations, with its matrix
/// dimension and Laplace eigenvalue carried alongside the integer label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualPoint {
    pub index: DualIndex,
    pub dim: usize,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualIndex {
    /// Frequency vector k in Z^n.
    Torus(Vec<i64>),
    /// Twice the spin, so half-integer spins stay exact.
    Su2(u32),
}

impl DualPoint {
    pub fn torus(k: Vec<i64>) -> Self {
        let eigenvalue = k.iter().map(|&c| (c as f64) * (c as f64)).sum();
        DualPoint {
            index: DualIndex::Torus(k),
            dim: 1,
            eigenvalue,
        }
    }

    pub fn su2(twice_l: u32) -> Self {
        DualPoint {
            index: DualIndex::Su2(twice_l),
            dim: su2::spin_dim(twice_l),
            eigenvalue: su2::casimir(twice_l),
        }
    }

    /// The weight <xi> = (1 + lambda_xi)^{1/2}.
    pub fn bracket(&self) -> f64 {
        (1.0 + self.eigenvalue).sqrt()
    }

    /// Largest coordinate band occupied by this representation: max |k_j| on
    /// the torus, 2l on SU(2). Grid exactness rules are stated in this unit.
    pub fn coordinate_band(&self) -> usize {
        match &self.index {
            DualIndex::Torus(k) => k.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0),
            DualIndex::Su2(t) => *t as usize,
        }
    }

    pub fn belongs_to(&self, g: &Group) -> bool {
        match (&self.index, g) {
            (DualIndex::Torus(k), Group::Torus { dim }) => k.len() == *dim,
            (DualIndex::Su2(_), Group::Su2) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupPoint {
    Torus(Vec<f64>),
    Su2(Su2Point),
}

impl GroupPoint {
    /// Coordinates for reports: torus angles, or zyz Euler angles on SU(2).
    pub fn coords(&self) -> Vec<f64> {
        match self {
            GroupPoint::Torus(x) => x.clone(),
            GroupPoint::Su2(p) => {
                let (a, b, g) = p.to_euler();
                vec![a, b, g]
            }
        }
    }

    pub fn belongs_to(&self, g: &Group) -> bool {
        match (self, g) {
            (GroupPoint::Torus(x), Group::Torus { dim }) => x.len() == *dim,
            (GroupPoint::Su2(_), Group::Su2) => true,
            _ => false,
        }
    }
}

impl Group {
    /// Manifold dimension n: torus rank, or 3 for SU(2).
    pub fn dimension(&self) -> usize {
        match self {
            Group::Torus { dim } => *dim,
            Group::Su2 => 3,
        }
    }

    pub fn identity(&self) -> GroupPoint {
        match self {
            Group::Torus { dim } => GroupPoint::Torus(vec![0.0; *dim]),
            Group::Su2 => GroupPoint::Su2(Su2Point::identity()),
        }
    }

    pub fn multiply(&self, x: &GroupPoint, y: &GroupPoint) -> Result<GroupPoint> {
        self.check_point(x)?;
        self.check_point(y)?;
        match (x, y) {
            (GroupPoint::Torus(a), GroupPoint::Torus(b)) => Ok(GroupPoint::Torus(
                a.iter()
                    .zip(b.iter())
                    .map(|(u, v)| (u + v).rem_euclid(TAU))
                    .collect(),
            )),
            (GroupPoint::Su2(a), GroupPoint::Su2(b)) => Ok(GroupPoint::Su2(a.multiply(b))),
            _ => unreachable!("points checked against the same group"),
        }
    }

    pub fn inverse(&self, x: &GroupPoint) -> Result<GroupPoint> {
        self.check_point(x)?;
        match x {
            GroupPoint::Torus(a) => Ok(GroupPoint::Torus(
                a.iter().map(|u| (-u).rem_euclid(TAU)).collect(),
            )),
            GroupPoint::Su2(p) => Ok(GroupPoint::Su2(p.inverse())),
        }
    }

    /// All dual classes with <xi> <= lambda, in canonical order: lexicographic
    /// frequency order on the torus, ascending 2l on SU(2). The comparison
    /// uses the exact integer quantity 1 + lambda_xi against lambda^2.
    pub fn enumerate_dual(&self, lambda: f64) -> Result<Vec<DualPoint>> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Config(format!(
                "window radius must be positive and finite, got {lambda}"
            )));
        }
        let lam2 = lambda * lambda;
        let mut out = Vec::new();
        match self {
            Group::Torus { dim } => {
                if *dim == 0 {
                    return Err(Error::Config("torus rank must be at least 1".into()));
                }
                let bound = lambda.floor() as i64 + 1;
                let mut k = vec![0i64; *dim];
                enumerate_torus(&mut out, &mut k, 0, 0, bound, lam2);
            }
            Group::Su2 => {
                let mut t = 0u32;
                loop {
                    let one_plus = 1.0 + su2::casimir(t);
                    if one_plus > lam2 {
                        break;
                    }
                    out.push(DualPoint::su2(t));
                    t += 1;
                }
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyWindow { lambda });
        }
        Ok(out)
    }

    pub fn laplace_eigenvalue(&self, xi: &DualPoint) -> Result<f64> {
        self.check_dual(xi)?;
        Ok(xi.eigenvalue)
    }

    /// The unitary matrix xi(x): a 1x1 character on the torus, the spin-l
    /// Wigner matrix on SU(2).
    pub fn rep_matrix(&self, xi: &DualPoint, x: &GroupPoint) -> Result<CMat> {
        self.check_dual(xi)?;
        self.check_point(x)?;
        match (&xi.index, x) {
            (DualIndex::Torus(k), GroupPoint::Torus(coords)) => {
                let phase: f64 = k
                    .iter()
                    .zip(coords.iter())
                    .map(|(&ki, &xi)| ki as f64 * xi)
                    .sum();
                let mut m = CMat::zeros(1, 1);
                m[(0, 0)] = C64::new(0.0, phase).exp();
                Ok(m)
            }
            (DualIndex::Su2(t), GroupPoint::Su2(p)) => su2::wigner_matrix(*t, p),
            _ => unreachable!("dual and point checked against the same group"),
        }
    }

    /// Haar quadrature at the given resolution.
    ///
    /// Torus: the uniform product grid with R^n nodes of equal weight; it
    /// integrates e^{i k.x} exactly whenever every |k_j| <= R - 1.
    ///
    /// SU(2): zyz Euler product grid with R uniform nodes in alpha over
    /// [0, 2pi), ceil(R/2) Gauss-Legendre nodes in cos(beta), and R uniform
    /// nodes in gamma over [0, 4pi) -- the gamma range covers the double
    /// cover so half-integer spins integrate correctly. The rule is exact for
    /// products of two Wigner entries whenever 2(l1 + l2) <= R - 1.
    pub fn haar_quadrature(&self, resolution: usize) -> Result<QuadratureGrid> {
        if resolution < 2 {
            return Err(Error::Config(format!(
                "quadrature resolution must be at least 2, got {resolution}"
            )));
        }
        match self {
            Group::Torus { dim } => {
                let n = *dim;
                let total = resolution.checked_pow(n as u32).ok_or_else(|| {
                    Error::Config(format!("grid of resolution {resolution}^{n} overflows"))
                })?;
                let mut nodes = Vec::with_capacity(total);
                let w = 1.0 / total as f64;
                let mut idx = vec![0usize; n];
                loop {
                    nodes.push(GroupPoint::Torus(
                        idx.iter().map(|&i| TAU * i as f64 / resolution as f64).collect(),
                    ));
                    // lexicographic increment
                    let mut c = n;
                    while c > 0 {
                        idx[c - 1] += 1;
                        if idx[c - 1] < resolution {
                            break;
                        }
                        idx[c - 1] = 0;
                        c -= 1;
                    }
                    if c == 0 {
                        break;
                    }
                }
                Ok(QuadratureGrid {
                    group: *self,
                    resolution,
                    weights: vec![w; nodes.len()],
                    nodes,
                })
            }
            Group::Su2 => {
                let r = resolution;
                let nb = r.div_ceil(2);
                let (us, gws) = gauss_legendre(nb);
                let mut nodes = Vec::with_capacity(r * r * nb);
                let mut weights = Vec::with_capacity(r * r * nb);
                for ia in 0..r {
                    let alpha = TAU * ia as f64 / r as f64;
                    for ib in 0..nb {
                        let beta = us[ib].acos();
                        for ig in 0..r {
                            let gamma = 2.0 * TAU * ig as f64 / r as f64;
                            nodes.push(GroupPoint::Su2(Su2Point::from_euler(alpha, beta, gamma)));
                            weights.push(gws[ib] / (2.0 * (r * r) as f64));
                        }
                    }
                }
                Ok(QuadratureGrid {
                    group: *self,
                    resolution,
                    nodes,
                    weights,
                })
            }
        }
    }

    /// Haar-distributed point from a caller-owned generator.
    pub fn random_point(&self, rng: &mut dyn RngCore) -> GroupPoint {
        match self {
            Group::Torus { dim } => {
                GroupPoint::Torus((0..*dim).map(|_| TAU * unit_f64(rng)).collect())
            }
            Group::Su2 => {
                // normalized 4-dimensional Gaussian = uniform on S^3
                loop {
                    let q: Vec<f64> = (0..4).map(|_| standard_normal(rng)).collect();
                    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 1e-6 {
                        return GroupPoint::Su2(Su2Point {
                            a: c64(q[0] / norm, q[1] / norm),
                            b: c64(q[2] / norm, q[3] / norm),
                        });
                    }
                }
            }
        }
    }

    pub fn check_point(&self, x: &GroupPoint) -> Result<()> {
        if x.belongs_to(self) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!("point does not live on {self}")))
        }
    }

    pub fn check_dual(&self, xi: &DualPoint) -> Result<()> {
        if xi.belongs_to(self) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "dual point does not index a representation of {self}"
            )))
        }
    }
}

fn enumerate_torus(
    out: &mut Vec<DualPoint>,
    k: &mut Vec<i64>,
    depth: usize,
    sumsq: i64,
    bound: i64,
    lam2: f64,
) {
    if depth == k.len() {
        if 1.0 + sumsq as f64 <= lam2 {
            out.push(DualPoint::torus(k.clone()));
        }
        return;
    }
    for c in -bound..=bound {
        let acc = sumsq + c * c;
        if 1.0 + acc as f64 > lam2 {
            continue;
        }
        k[depth] = c;
        enumerate_torus(out, k, depth + 1, acc, bound, lam2);
    }
    k[depth] = 0;
}

pub(crate) fn unit_f64(rng: &mut dyn RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn standard_normal(rng: &mut dyn RngCore) -> f64 {
    // Box-Muller; resample the log argument away from zero
    let mut u = unit_f64(rng);
    if u <= f64::MIN_POSITIVE {
        u = f64::MIN_POSITIVE;
    }
    let v = unit_f64(rng);
    (-2.0 * u.ln()).sqrt() * (TAU * v).cos()
}

/// Nodes and weights of a Haar rule, with the resolution retained so callers
/// can validate band content before integrating.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub group: Group,
    pub resolution: usize,
    pub nodes: Vec<GroupPoint>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest coordinate band B such that products of two factors with bands
    /// b1 + b2 <= B integrate exactly (see `haar_quadrature`).
    pub fn exact_pair_band(&self) -> usize {
        self.resolution - 1
    }

    pub fn integrate<F>(&self, mut f: F) -> C64
    where
        F: FnMut(&GroupPoint) -> C64,
    {
        let mut acc = c64(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            acc += f(x) * *w;
        }
        acc
    }
}
