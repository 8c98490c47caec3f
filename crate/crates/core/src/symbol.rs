//! Matrix-valued symbols sigma(x, xi) and their dual-side norms.
//!
//! A symbol is either invariant (a pure Fourier multiplier xi -> sigma(xi))
//! or, on the torus, a declared finite expansion
//! sigma(x, xi) = sum_t e^{i eta_t . x} m_t(xi). Keeping the x-expansion
//! explicit is what lets the regularity criterion weight individual x-modes
//! and lets the quantizer bound band content for aliasing checks.
//!
//! Scalar multiples of the identity are tracked structurally so that norms
//! and spectra of large SU(2) representations never materialize d x d
//! matrices when a single modulus suffices; every public contract still
//! treats such symbols as full matrices.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{DualIndex, DualPoint, Group, GroupPoint, QuadratureGrid};
use crate::linalg::{c64, C64, CMat};
use crate::window::TruncationWindow;

pub type ScalarFn = Arc<dyn Fn(&DualPoint) -> C64 + Send + Sync>;
pub type MultiplierFn = Arc<dyn Fn(&DualPoint) -> CMat + Send + Sync>;

#[derive(Clone)]
pub enum InvariantPart {
    /// sigma(xi) = s(xi) * I_d.
    Scalar(ScalarFn),
    /// Arbitrary d x d multiplier.
    Matrix(MultiplierFn),
}

impl InvariantPart {
    fn eval(&self, xi: &DualPoint) -> Result<CMat> {
        match self {
            InvariantPart::Scalar(f) => {
                let s = f(xi);
                let mut m = CMat::zeros(xi.dim, xi.dim);
                for i in 0..xi.dim {
                    m[(i, i)] = s;
                }
                Ok(m)
            }
            InvariantPart::Matrix(f) => {
                let m = f(xi);
                if m.nrows() != xi.dim || m.ncols() != xi.dim {
                    return Err(Error::Mismatch(format!(
                        "multiplier returned {}x{} for a dual point of dimension {}",
                        m.nrows(),
                        m.ncols(),
                        xi.dim
                    )));
                }
                Ok(m)
            }
        }
    }

    fn scale(&self, amp: C64) -> InvariantPart {
        match self {
            InvariantPart::Scalar(f) => {
                let f = f.clone();
                InvariantPart::Scalar(Arc::new(move |xi| amp * f(xi)))
            }
            InvariantPart::Matrix(f) => {
                let f = f.clone();
                InvariantPart::Matrix(Arc::new(move |xi| f(xi) * amp))
            }
        }
    }
}

#[derive(Clone)]
struct XTerm {
    freq: Vec<i64>,
    part: InvariantPart,
}

#[derive(Clone)]
enum SymbolForm {
    Invariant(InvariantPart),
    /// Torus-only declared x-expansion.
    Expansion(Vec<XTerm>),
}

/// Result of evaluating a symbol at one (x, xi): either a tracked scalar
/// multiple of the identity or a dense matrix.
pub(crate) enum EvalOut {
    Scalar(C64, usize),
    Matrix(CMat),
}

impl EvalOut {
    /// sum_i s_i^p for finite p; largest singular value for p = inf.
    pub(crate) fn schatten_power(&self, p: f64) -> Result<f64> {
        match self {
            EvalOut::Scalar(s, d) => {
                let a = s.norm();
                if p.is_infinite() {
                    Ok(a)
                } else {
                    Ok(*d as f64 * a.powf(p))
                }
            }
            EvalOut::Matrix(m) => {
                let sv = crate::linalg::singular_values_of(m)?;
                Ok(crate::linalg::power_sum(&sv, p))
            }
        }
    }

    pub(crate) fn hs_norm(&self) -> Result<f64> {
        match self {
            EvalOut::Scalar(s, d) => Ok(s.norm() * (*d as f64).sqrt()),
            EvalOut::Matrix(m) => {
                let sv = crate::linalg::singular_values_of(m)?;
                Ok(crate::linalg::hs_norm_from_svals(&sv))
            }
        }
    }

    pub(crate) fn operator_norm(&self) -> Result<f64> {
        match self {
            EvalOut::Scalar(s, _) => Ok(s.norm()),
            EvalOut::Matrix(m) => {
                let sv = crate::linalg::singular_values_of(m)?;
                Ok(crate::linalg::operator_norm_from_svals(&sv))
            }
        }
    }

    pub(crate) fn smallest_sval(&self) -> Result<f64> {
        match self {
            EvalOut::Scalar(s, _) => Ok(s.norm()),
            EvalOut::Matrix(m) => {
                let sv = crate::linalg::singular_values_of(m)?;
                Ok(sv.last().copied().unwrap_or(0.0))
            }
        }
    }
}

#[derive(Clone)]
pub struct MatrixSymbol {
    pub group: Group,
    label: String,
    /// Declared growth order m: |sigma| ~ <xi>^m. Required by ellipticity and
    /// threshold checks; estimators work without it.
    pub declared_order: Option<f64>,
    /// Declared (rho, delta) smoothness parameters, when meaningful.
    pub declared_smoothness: Option<(f64, f64)>,
    form: SymbolForm,
}

impl MatrixSymbol {
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Bessel-potential multiplier <xi>^m I.
    pub fn bessel(group: Group, m: f64) -> MatrixSymbol {
        MatrixSymbol {
            group,
            label: format!("bessel{{{m}}}"),
            declared_order: Some(m),
            declared_smoothness: Some((1.0, 0.0)),
            form: SymbolForm::Invariant(InvariantPart::Scalar(Arc::new(move |xi| {
                c64(xi.bracket().powf(m), 0.0)
            }))),
        }
    }

    /// Lacunary multiplier on T^n: <k>^{-kappa} on the dyadic set
    /// {2^j e_1 : j >= 1} and zero everywhere else. Its only nonzero first
    /// difference on the support is -<2^j e_1>^{-kappa} exactly, since
    /// 2^j + 1 is never a power of two for j >= 1.
    pub fn dyadic(dim: usize, kappa: f64) -> Result<MatrixSymbol> {
        if dim == 0 {
            return Err(Error::Config("torus rank must be at least 1".into()));
        }
        if !(kappa > 0.0) {
            return Err(Error::Config(format!(
                "dyadic decay rate must be positive, got {kappa}"
            )));
        }
        Ok(MatrixSymbol {
            group: Group::Torus { dim },
            label: format!("dyadic{{{dim},{kappa}}}"),
            declared_order: Some(-kappa),
            declared_smoothness: None,
            form: SymbolForm::Invariant(InvariantPart::Scalar(Arc::new(move |xi| {
                match &xi.index {
                    DualIndex::Torus(k) => {
                        let head = k[0];
                        let lacunary = head >= 2
                            && (head & (head - 1)) == 0
                            && k[1..].iter().all(|&c| c == 0);
                        if lacunary {
                            c64(xi.bracket().powf(-kappa), 0.0)
                        } else {
                            c64(0.0, 0.0)
                        }
                    }
                    _ => c64(0.0, 0.0),
                }
            }))),
        })
    }

    /// Invariant scalar multiplier s(xi) * I.
    pub fn scalar_multiplier(
        group: Group,
        label: impl Into<String>,
        declared_order: Option<f64>,
        f: ScalarFn,
    ) -> MatrixSymbol {
        MatrixSymbol {
            group,
            label: label.into(),
            declared_order,
            declared_smoothness: None,
            form: SymbolForm::Invariant(InvariantPart::Scalar(f)),
        }
    }

    /// Invariant matrix multiplier xi -> sigma(xi).
    pub fn multiplier(
        group: Group,
        label: impl Into<String>,
        declared_order: Option<f64>,
        f: MultiplierFn,
    ) -> MatrixSymbol {
        MatrixSymbol {
            group,
            label: label.into(),
            declared_order,
            declared_smoothness: None,
            form: SymbolForm::Invariant(InvariantPart::Matrix(f)),
        }
    }

    pub fn zero(group: Group) -> MatrixSymbol {
        MatrixSymbol {
            group,
            label: "zero".into(),
            // order 0 is a (weak) upper bound; it lets ellipticity checks run
            declared_order: Some(0.0),
            declared_smoothness: None,
            form: SymbolForm::Invariant(InvariantPart::Scalar(Arc::new(|_| c64(0.0, 0.0)))),
        }
    }

    /// Random real invariant scalar multiplier with envelope <xi>^{-decay}.
    /// The value at each dual point is a deterministic function of the seed
    /// and the dual index, so repeated evaluations agree. Real scalar values
    /// make the quantized operator self-adjoint.
    pub fn random_real_multiplier(group: Group, seed: u64, decay: f64) -> MatrixSymbol {
        MatrixSymbol {
            group,
            label: format!("random{{seed={seed},decay={decay}}}"),
            declared_order: Some(-decay),
            declared_smoothness: None,
            form: SymbolForm::Invariant(InvariantPart::Scalar(Arc::new(move |xi| {
                let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
                let mut mix = |v: u64| {
                    h ^= v.wrapping_add(0x9e37_79b9_7f4a_7c15)
                        .wrapping_add(h << 6)
                        .wrapping_add(h >> 2);
                };
                match &xi.index {
                    DualIndex::Torus(k) => {
                        mix(k.len() as u64);
                        for &c in k {
                            mix(c as u64);
                        }
                    }
                    DualIndex::Su2(t) => {
                        mix(1 << 32);
                        mix(*t as u64);
                    }
                }
                use rand_core::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(h);
                let u = 2.0 * crate::group::unit_f64(&mut rng) - 1.0;
                c64(u * xi.bracket().powf(-decay), 0.0)
            }))),
        }
    }

    /// c(x) * base(xi) for a trigonometric polynomial coefficient
    /// c(x) = sum_t amp_t e^{i freq_t . x} on the torus.
    pub fn coefficient(modes: &[(Vec<i64>, C64)], base: &MatrixSymbol) -> Result<MatrixSymbol> {
        let dim = match base.group {
            Group::Torus { dim } => dim,
            Group::Su2 => {
                return Err(Error::Unsupported(
                    "coefficient expansions are defined on the torus".into(),
                ))
            }
        };
        if modes.is_empty() {
            return Err(Error::Config("coefficient needs at least one mode".into()));
        }
        for (freq, _) in modes {
            if freq.len() != dim {
                return Err(Error::Mismatch(format!(
                    "coefficient mode of rank {} on T^{dim}",
                    freq.len()
                )));
            }
        }
        let base_terms = base.expansion_terms();
        let mut terms = Vec::with_capacity(modes.len() * base_terms.len());
        for (freq, amp) in modes {
            for bt in &base_terms {
                let sum_freq: Vec<i64> = freq.iter().zip(bt.freq.iter()).map(|(a, b)| a + b).collect();
                terms.push(XTerm {
                    freq: sum_freq,
                    part: bt.part.scale(*amp),
                });
            }
        }
        let mode_desc: Vec<String> = modes
            .iter()
            .map(|(f, a)| format!("{f:?}*({},{})", a.re, a.im))
            .collect();
        Ok(MatrixSymbol {
            group: base.group,
            label: format!("coeff{{{}}}:{}", mode_desc.join("+"), base.label),
            declared_order: base.declared_order,
            declared_smoothness: base.declared_smoothness,
            form: SymbolForm::Expansion(terms),
        })
    }

    /// Pointwise sum. Invariant symbols stay invariant; anything else merges
    /// the declared expansions (torus only).
    pub fn add(&self, other: &MatrixSymbol) -> Result<MatrixSymbol> {
        if self.group != other.group {
            return Err(Error::Mismatch("adding symbols over different groups".into()));
        }
        let label = format!("({})+({})", self.label, other.label);
        let form = match (&self.form, &other.form) {
            (SymbolForm::Invariant(a), SymbolForm::Invariant(b)) => {
                SymbolForm::Invariant(add_parts(a, b))
            }
            _ => {
                if !matches!(self.group, Group::Torus { .. }) {
                    return Err(Error::Unsupported(
                        "x-dependent expansions are defined on the torus".into(),
                    ));
                }
                let mut terms = self.expansion_terms();
                terms.extend(other.expansion_terms());
                SymbolForm::Expansion(terms)
            }
        };
        Ok(MatrixSymbol {
            group: self.group,
            label,
            declared_order: match (self.declared_order, other.declared_order) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
            declared_smoothness: None,
            form,
        })
    }

    fn expansion_terms(&self) -> Vec<XTerm> {
        match &self.form {
            SymbolForm::Invariant(p) => {
                let n = self.group.dimension();
                vec![XTerm {
                    freq: vec![0; n],
                    part: p.clone(),
                }]
            }
            SymbolForm::Expansion(ts) => ts.clone(),
        }
    }

    pub fn is_invariant(&self) -> bool {
        match &self.form {
            SymbolForm::Invariant(_) => true,
            SymbolForm::Expansion(ts) => ts.iter().all(|t| t.freq.iter().all(|&f| f == 0)),
        }
    }

    /// Largest coordinate frequency of the x-dependence; 0 for invariant
    /// symbols. Enters grid-resolution requirements additively.
    pub fn x_band(&self) -> usize {
        match &self.form {
            SymbolForm::Invariant(_) => 0,
            SymbolForm::Expansion(ts) => ts
                .iter()
                .flat_map(|t| t.freq.iter().map(|f| f.unsigned_abs() as usize))
                .max()
                .unwrap_or(0),
        }
    }

    pub fn eval(&self, x: &GroupPoint, xi: &DualPoint) -> Result<CMat> {
        match self.eval_out(x, xi)? {
            EvalOut::Scalar(s, d) => {
                let mut m = CMat::zeros(d, d);
                for i in 0..d {
                    m[(i, i)] = s;
                }
                Ok(m)
            }
            EvalOut::Matrix(m) => Ok(m),
        }
    }

    /// Evaluate an invariant symbol without supplying a base point.
    pub fn eval_invariant(&self, xi: &DualPoint) -> Result<CMat> {
        self.eval(&self.group.identity(), xi)
    }

    pub(crate) fn eval_out(&self, x: &GroupPoint, xi: &DualPoint) -> Result<EvalOut> {
        self.group.check_point(x)?;
        self.group.check_dual(xi)?;
        match &self.form {
            SymbolForm::Invariant(InvariantPart::Scalar(f)) => Ok(EvalOut::Scalar(f(xi), xi.dim)),
            SymbolForm::Invariant(p @ InvariantPart::Matrix(_)) => Ok(EvalOut::Matrix(p.eval(xi)?)),
            SymbolForm::Expansion(terms) => {
                let coords = match x {
                    GroupPoint::Torus(c) => c,
                    _ => {
                        return Err(Error::Unsupported(
                            "x-dependent expansions are defined on the torus".into(),
                        ))
                    }
                };
                let all_scalar = terms
                    .iter()
                    .all(|t| matches!(t.part, InvariantPart::Scalar(_)));
                if all_scalar {
                    let mut acc = c64(0.0, 0.0);
                    for t in terms {
                        let phase: f64 = t
                            .freq
                            .iter()
                            .zip(coords.iter())
                            .map(|(&f, &c)| f as f64 * c)
                            .sum();
                        if let InvariantPart::Scalar(f) = &t.part {
                            acc += C64::new(0.0, phase).exp() * f(xi);
                        }
                    }
                    Ok(EvalOut::Scalar(acc, xi.dim))
                } else {
                    let mut acc = CMat::zeros(xi.dim, xi.dim);
                    for t in terms {
                        let phase: f64 = t
                            .freq
                            .iter()
                            .zip(coords.iter())
                            .map(|(&f, &c)| f as f64 * c)
                            .sum();
                        acc += t.part.eval(xi)? * C64::new(0.0, phase).exp();
                    }
                    Ok(EvalOut::Matrix(acc))
                }
            }
        }
    }

    pub(crate) fn eval_out_invariant(&self, xi: &DualPoint) -> Result<EvalOut> {
        self.eval_out(&self.group.identity(), xi)
    }

    /// Iterated forward difference Delta^alpha in the dual variable, torus
    /// only: (Delta_j f)(k) = f(k + e_j) - f(k), composed per coordinate.
    /// Implemented through the alternating-sum expansion
    /// sum_{beta <= alpha} (-1)^{|alpha - beta|} C(alpha, beta) f(k + beta).
    pub fn difference(&self, alpha: &[u32]) -> Result<MatrixSymbol> {
        let dim = match self.group {
            Group::Torus { dim } => dim,
            Group::Su2 => {
                return Err(Error::Unsupported(
                    "difference operators are provided on the torus only".into(),
                ))
            }
        };
        if alpha.len() != dim {
            return Err(Error::Mismatch(format!(
                "difference multi-index of rank {} on T^{dim}",
                alpha.len()
            )));
        }
        let alpha: Vec<u32> = alpha.to_vec();
        let terms = self.expansion_terms();
        let new_terms: Vec<XTerm> = terms
            .into_iter()
            .map(|t| XTerm {
                freq: t.freq,
                part: difference_part(&t.part, &alpha),
            })
            .collect();
        let form = if new_terms.len() == 1 && new_terms[0].freq.iter().all(|&f| f == 0) {
            SymbolForm::Invariant(new_terms.into_iter().next().unwrap().part)
        } else {
            SymbolForm::Expansion(new_terms)
        };
        Ok(MatrixSymbol {
            group: self.group,
            label: format!("diff{alpha:?}:{}", self.label),
            declared_order: None,
            declared_smoothness: None,
            form,
        })
    }

    /// Weight each declared x-mode eta by <eta>^N; this realizes the operator
    /// (1 + L)^{N/2} acting in the x variable on the declared expansion.
    pub fn laplace_weight_in_x(&self, big_n: f64) -> Result<MatrixSymbol> {
        if self.is_invariant() {
            // constant in x: the zero mode carries weight <0>^N = 1
            let mut out = self.clone();
            out.label = format!("xweight{{{big_n}}}:{}", self.label);
            return Ok(out);
        }
        if !matches!(self.group, Group::Torus { .. }) {
            return Err(Error::Unsupported(
                "x-regularization needs a declared torus expansion".into(),
            ));
        }
        let terms = self.expansion_terms();
        let new_terms: Vec<XTerm> = terms
            .into_iter()
            .map(|t| {
                let eta = DualPoint::torus(t.freq.clone());
                let w = eta.bracket().powf(big_n);
                XTerm {
                    part: t.part.scale(c64(w, 0.0)),
                    freq: t.freq,
                }
            })
            .collect();
        Ok(MatrixSymbol {
            group: self.group,
            label: format!("xweight{{{big_n}}}:{}", self.label),
            declared_order: self.declared_order,
            declared_smoothness: None,
            form: SymbolForm::Expansion(new_terms),
        })
    }
}

fn add_parts(a: &InvariantPart, b: &InvariantPart) -> InvariantPart {
    match (a, b) {
        (InvariantPart::Scalar(fa), InvariantPart::Scalar(fb)) => {
            let (fa, fb) = (fa.clone(), fb.clone());
            InvariantPart::Scalar(Arc::new(move |xi| fa(xi) + fb(xi)))
        }
        _ => {
            let (pa, pb) = (a.clone(), b.clone());
            InvariantPart::Matrix(Arc::new(move |xi| {
                // dimension errors surface at eval time through the checked path
                let ma = pa.eval(xi).expect("left summand evaluation");
                let mb = pb.eval(xi).expect("right summand evaluation");
                ma + mb
            }))
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// All beta <= alpha with the signed binomial weight of the forward
/// difference expansion.
fn difference_stencil(alpha: &[u32]) -> Vec<(Vec<i64>, f64)> {
    let mut stencil = vec![(vec![0i64; alpha.len()], 1.0f64)];
    for (j, &aj) in alpha.iter().enumerate() {
        if aj == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(stencil.len() * (aj as usize + 1));
        for (base, w) in &stencil {
            for bj in 0..=aj {
                let sign = if (aj - bj) % 2 == 0 { 1.0 } else { -1.0 };
                let mut shifted = base.clone();
                shifted[j] += bj as i64;
                next.push((shifted, w * sign * binomial(aj, bj)));
            }
        }
        stencil = next;
    }
    stencil
}

fn shift_dual(xi: &DualPoint, beta: &[i64]) -> DualPoint {
    match &xi.index {
        DualIndex::Torus(k) => {
            DualPoint::torus(k.iter().zip(beta.iter()).map(|(a, b)| a + b).collect())
        }
        _ => unreachable!("difference operators are torus-only"),
    }
}

fn difference_part(part: &InvariantPart, alpha: &[u32]) -> InvariantPart {
    let stencil = difference_stencil(alpha);
    match part {
        InvariantPart::Scalar(f) => {
            let f = f.clone();
            InvariantPart::Scalar(Arc::new(move |xi| {
                let mut acc = c64(0.0, 0.0);
                for (beta, w) in &stencil {
                    acc += f(&shift_dual(xi, beta)) * *w;
                }
                acc
            }))
        }
        InvariantPart::Matrix(f) => {
            let f = f.clone();
            InvariantPart::Matrix(Arc::new(move |xi| {
                let mut acc = f(&shift_dual(xi, &stencil[0].0)) * c64(stencil[0].1, 0.0);
                for (beta, w) in &stencil[1..] {
                    acc += f(&shift_dual(xi, beta)) * c64(*w, 0.0);
                }
                acc
            }))
        }
    }
}

// ---------------------------------------------------------------------------
// Dual-side norms
// ---------------------------------------------------------------------------

/// Which norm is applied across the dual at fixed x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InnerDualNorm {
    /// ( sum_xi d_xi ||sigma(x, xi)||_{S_p}^p )^{1/p}; sup of operator norms
    /// for p = inf.
    Schatten(f64),
    /// ( sum_xi d_xi^{p(2/p - 1/2)} ||sigma(x, xi)||_{HS}^p )^{1/p};
    /// sup_xi d^{-1/2} ||.||_HS for p = inf.
    Lp(f64),
}

impl InnerDualNorm {
    pub fn exponent(&self) -> f64 {
        match self {
            InnerDualNorm::Schatten(p) | InnerDualNorm::Lp(p) => *p,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            InnerDualNorm::Schatten(p) => format!("schatten_dual({p})"),
            InnerDualNorm::Lp(p) => format!("lp_dual({p})"),
        }
    }

    fn validate(&self) -> Result<()> {
        let p = self.exponent();
        if p.is_infinite() && p > 0.0 {
            return Ok(());
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Config(format!(
                "dual norm exponent must be positive, got {p}"
            )));
        }
        Ok(())
    }
}

/// Per-dual p-th power contribution of the inner norm at fixed x, in window
/// order. For p = inf the entries are the per-dual sup quantities instead
/// (combine with max, not +).
pub fn dual_norm_terms(
    s: &MatrixSymbol,
    x: &GroupPoint,
    inner: InnerDualNorm,
    w: &TruncationWindow,
) -> Result<Vec<f64>> {
    inner.validate()?;
    w.check_same_group(&s.group)?;
    let p = inner.exponent();
    let mut out = Vec::with_capacity(w.duals().len());
    for xi in w.duals() {
        let ev = s.eval_out(x, xi)?;
        let d = xi.dim as f64;
        let term = match inner {
            InnerDualNorm::Schatten(_) => {
                if p.is_infinite() {
                    ev.operator_norm()?
                } else {
                    d * ev.schatten_power(p)?
                }
            }
            InnerDualNorm::Lp(_) => {
                let hs = ev.hs_norm()?;
                if p.is_infinite() {
                    hs / d.sqrt()
                } else {
                    d.powf(p * (2.0 / p - 0.5)) * hs.powf(p)
                }
            }
        };
        if !term.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite norm contribution at {:?}",
                xi.index
            )));
        }
        out.push(term);
    }
    Ok(out)
}

fn combine_terms(terms: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        terms.iter().copied().fold(0.0, f64::max)
    } else {
        terms.iter().sum::<f64>().powf(1.0 / p)
    }
}

/// ||sigma(x, .)||_{S_p(dual)} over the window.
pub fn schatten_dual_norm(
    s: &MatrixSymbol,
    x: &GroupPoint,
    p: f64,
    w: &TruncationWindow,
) -> Result<f64> {
    let terms = dual_norm_terms(s, x, InnerDualNorm::Schatten(p), w)?;
    Ok(combine_terms(&terms, p))
}

/// ||sigma(x, .)||_{l_p(dual)} over the window, with the dimension weights
/// that make p = 2 coincide with the Plancherel norm.
pub fn lp_dual_norm(
    s: &MatrixSymbol,
    x: &GroupPoint,
    p: f64,
    w: &TruncationWindow,
) -> Result<f64> {
    let terms = dual_norm_terms(s, x, InnerDualNorm::Lp(p), w)?;
    Ok(combine_terms(&terms, p))
}

/// L^{p_outer}(G)-in-x of the inner dual norm, with nested partial values
/// along dyadic sub-windows recorded for convergence diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct SymbolNormReport {
    pub label: String,
    pub inner_norm: String,
    pub outer_p: f64,
    pub lambda: f64,
    pub value: f64,
    /// (cutoff, partial norm value), cutoffs ascending, values nondecreasing.
    pub per_shell: Vec<(f64, f64)>,
}

fn dyadic_cutoffs(lambda: f64) -> Vec<f64> {
    let mut cuts = vec![lambda];
    let mut c = lambda / 2.0;
    while c >= 1.0 {
        cuts.push(c);
        c /= 2.0;
    }
    cuts.reverse();
    cuts
}

pub fn mixed_norm(
    s: &MatrixSymbol,
    outer_p: f64,
    inner: InnerDualNorm,
    w: &TruncationWindow,
    grid: &QuadratureGrid,
) -> Result<SymbolNormReport> {
    inner.validate()?;
    if !(outer_p.is_infinite() && outer_p > 0.0) && !(outer_p.is_finite() && outer_p > 0.0) {
        return Err(Error::Config(format!(
            "outer exponent must be positive, got {outer_p}"
        )));
    }
    w.check_same_group(&s.group)?;
    if grid.group != s.group {
        return Err(Error::Mismatch(
            "quadrature grid and symbol live on different groups".into(),
        ));
    }
    let p = inner.exponent();
    let cutoffs = dyadic_cutoffs(w.lambda);
    let brackets: Vec<f64> = w.duals().iter().map(|d| d.bracket()).collect();

    // inner partial norms at every cutoff for one x
    let partial_profile = |terms: &[f64]| -> Vec<f64> {
        cutoffs
            .iter()
            .map(|&c| {
                let mut acc = 0.0f64;
                for (t, b) in terms.iter().zip(brackets.iter()) {
                    if *b <= c {
                        if p.is_infinite() {
                            acc = acc.max(*t);
                        } else {
                            acc += *t;
                        }
                    }
                }
                if p.is_infinite() {
                    acc
                } else {
                    acc.powf(1.0 / p)
                }
            })
            .collect()
    };

    let profile = if s.is_invariant() {
        // the inner norm is constant in x and the Haar measure has mass one
        let terms = dual_norm_terms(s, &s.group.identity(), inner, w)?;
        partial_profile(&terms)
    } else {
        let mut acc = vec![0.0f64; cutoffs.len()];
        for (x, wt) in grid.nodes.iter().zip(grid.weights.iter()) {
            let terms = dual_norm_terms(s, x, inner, w)?;
            let prof = partial_profile(&terms);
            for (a, v) in acc.iter_mut().zip(prof.iter()) {
                if outer_p.is_infinite() {
                    *a = a.max(*v);
                } else {
                    *a += wt * v.powf(outer_p);
                }
            }
        }
        if !outer_p.is_infinite() {
            for a in acc.iter_mut() {
                *a = a.powf(1.0 / outer_p);
            }
        }
        acc
    };

    let value = *profile.last().expect("at least the top cutoff");
    Ok(SymbolNormReport {
        label: s.label.clone(),
        inner_norm: inner.describe(),
        outer_p,
        lambda: w.lambda,
        value,
        per_shell: cutoffs.into_iter().zip(profile).collect(),
    })
}

/// Log-log fit of max_x ||(Delta^alpha sigma)(x, xi)||_op against <xi> over
/// the window. Dual points where the difference vanishes are excluded (the
/// fit is then over the support); an empty support is an error.
pub fn estimate_symbol_order(
    s: &MatrixSymbol,
    alpha: &[u32],
    w: &TruncationWindow,
    sample_points: &[GroupPoint],
) -> Result<(f64, f64)> {
    w.check_same_group(&s.group)?;
    let probe = if alpha.iter().any(|&a| a > 0) {
        s.difference(alpha)?
    } else {
        s.clone()
    };
    let xs: Vec<GroupPoint> = if sample_points.is_empty() {
        vec![s.group.identity()]
    } else {
        sample_points.to_vec()
    };
    let mut log_b = Vec::new();
    let mut log_v = Vec::new();
    for xi in w.duals() {
        let mut v = 0.0f64;
        for x in &xs {
            v = v.max(probe.eval_out(x, xi)?.operator_norm()?);
        }
        if v > 0.0 {
            log_b.push(xi.bracket().ln());
            log_v.push(v.ln());
        }
    }
    if log_b.len() < 2 {
        return Err(Error::UndefinedFit(
            "symbol vanishes on all but at most one dual point of the window".into(),
        ));
    }
    let (slope, _, rms) = crate::linalg::least_squares_line(&log_b, &log_v)?;
    Ok((slope, rms))
}
