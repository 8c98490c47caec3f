//! SU(2) realized through its defining matrix [[a, b], [-conj(b), conj(a)]]
//! with |a|^2 + |b|^2 = 1. Irreducible representations are the standard
//! spin-l Wigner matrices in the |l, m> basis with m ascending from -l to l,
//! evaluated through zyz Euler angles: D(alpha, beta, gamma) =
//! exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz). The middle factor comes
//! from the eigendecomposition of the tridiagonal generator Jy rather than a
//! closed-form polynomial expansion.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::linalg::{c64, C64, CMat};

/// Spin label stored as 2l so half-integers stay exact integers.
pub fn spin_dim(twice_l: u32) -> usize {
    twice_l as usize + 1
}

/// Casimir eigenvalue l(l+1) = t(t+2)/4 for t = 2l; exact in f64 for every
/// label reachable here.
pub fn casimir(twice_l: u32) -> f64 {
    let t = twice_l as f64;
    t * (t + 2.0) / 4.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Point {
    pub a: C64,
    pub b: C64,
}

impl Su2Point {
    pub fn identity() -> Self {
        Su2Point {
            a: c64(1.0, 0.0),
            b: c64(0.0, 0.0),
        }
    }

    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        let half = beta / 2.0;
        let pa = C64::new(0.0, (alpha + gamma) / 2.0).exp();
        let pb = C64::new(0.0, (alpha - gamma) / 2.0).exp();
        Su2Point {
            a: pa * half.cos(),
            b: pb * half.sin(),
        }
    }

    /// zyz angles with beta in [0, pi]. At the poles (b = 0 or a = 0) only the
    /// relevant phase sum/difference is determined; the other is set to zero,
    /// which leaves every representation matrix unchanged.
    pub fn to_euler(&self) -> (f64, f64, f64) {
        let beta = 2.0 * self.b.norm().atan2(self.a.norm());
        let pa = if self.a.norm() > 0.0 { self.a.arg() } else { 0.0 };
        let pb = if self.b.norm() > 0.0 { self.b.arg() } else { 0.0 };
        (pa + pb, beta, pa - pb)
    }

    pub fn multiply(&self, rhs: &Su2Point) -> Su2Point {
        Su2Point {
            a: self.a * rhs.a - self.b * rhs.b.conj(),
            b: self.a * rhs.b + self.b * rhs.a.conj(),
        }
    }

    pub fn inverse(&self) -> Su2Point {
        Su2Point {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// Deviation of a*conj(a) + b*conj(b) from 1; used by validity checks.
    pub fn unit_defect(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() - 1.0).abs()
    }
}

/// Eigendecomposition of Jy for one spin, plus a memo of exp(-i beta Jy)
/// keyed by the bit pattern of beta (quadrature grids reuse a small set of
/// polar angles, so the memo turns the O(d^3) rebuild into an O(d^2) scale).
struct SpinBasis {
    twice_l: u32,
    /// Unitary U with Jy = U diag(m) U*, m ascending -l..l.
    u: CMat,
    small_d: RwLock<HashMap<u64, Arc<CMat>>>,
}

const SMALL_D_CACHE_CAP: usize = 8192;

impl SpinBasis {
    fn build(twice_l: u32) -> Result<Arc<SpinBasis>> {
        let d = spin_dim(twice_l);
        let l = twice_l as f64 / 2.0;
        let mut jy = CMat::zeros(d, d);
        for r in 0..d - 1 {
            let m = r as f64 - l;
            let c = (l * (l + 1.0) - m * (m + 1.0)).sqrt();
            jy[(r + 1, r)] = c64(0.0, -c / 2.0);
            jy[(r, r + 1)] = c64(0.0, c / 2.0);
        }
        let eig = jy
            .symmetric_eigen();
        // sort columns by eigenvalue; the spectrum of Jy is exactly -l..l
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .partial_cmp(&eig.eigenvalues[j])
                .expect("finite eigenvalues")
        });
        let mut u = CMat::zeros(d, d);
        for (dst, &src) in order.iter().enumerate() {
            let snapped = dst as f64 - l;
            if (eig.eigenvalues[src] - snapped).abs() > 1e-8 {
                return Err(Error::Numeric(format!(
                    "Jy spectrum defect at 2l={twice_l}: {} vs {snapped}",
                    eig.eigenvalues[src]
                )));
            }
            u.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(Arc::new(SpinBasis {
            twice_l,
            u,
            small_d: RwLock::new(HashMap::new()),
        }))
    }

    /// exp(-i beta Jy) = U diag(exp(-i beta m)) U*, real orthogonal in exact
    /// arithmetic.
    fn small_d(&self, beta: f64) -> Arc<CMat> {
        let key = beta.to_bits();
        if let Some(hit) = self.small_d.read().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let d = spin_dim(self.twice_l);
        let l = self.twice_l as f64 / 2.0;
        let mut scaled = self.u.clone();
        for k in 0..d {
            let m = k as f64 - l;
            let phase = C64::new(0.0, -beta * m).exp();
            for r in 0..d {
                scaled[(r, k)] *= phase;
            }
        }
        let out = Arc::new(&scaled * self.u.adjoint());
        let mut map = self.small_d.write().expect("cache lock");
        if map.len() < SMALL_D_CACHE_CAP {
            map.insert(key, out.clone());
        }
        out
    }
}

fn spin_cache() -> &'static RwLock<HashMap<u32, Arc<SpinBasis>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<SpinBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn spin_basis(twice_l: u32) -> Result<Arc<SpinBasis>> {
    if let Some(hit) = spin_cache().read().expect("cache lock").get(&twice_l) {
        return Ok(hit.clone());
    }
    let built = SpinBasis::build(twice_l)?;
    spin_cache()
        .write()
        .expect("cache lock")
        .insert(twice_l, built.clone());
    Ok(built)
}

/// Wigner matrix D^l(x) for 2l = twice_l, rows and columns indexed by m
/// ascending from -l to l.
pub fn wigner_matrix(twice_l: u32, x: &Su2Point) -> Result<CMat> {
    let (alpha, beta, gamma) = x.to_euler();
    let d = spin_dim(twice_l);
    if twice_l == 0 {
        let mut out = CMat::zeros(1, 1);
        out[(0, 0)] = c64(1.0, 0.0);
        return Ok(out);
    }
    let basis = spin_basis(twice_l)?;
    let mid = basis.small_d(beta);
    let l = twice_l as f64 / 2.0;
    let mut out = CMat::zeros(d, d);
    for r in 0..d {
        let mp = r as f64 - l;
        let row_phase = C64::new(0.0, -mp * alpha).exp();
        for c in 0..d {
            let m = c as f64 - l;
            let col_phase = C64::new(0.0, -m * gamma).exp();
            out[(r, c)] = row_phase * mid[(r, c)] * col_phase;
        }
    }
    Ok(out)
}
