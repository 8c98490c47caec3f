//! Singular spectra of truncated operators and convergence diagnostics
//! along dyadic truncation ladders.
//!
//! A ladder is a sequence of cutoffs lambda_j with ratio 2. For each rung
//! the r-th power sum sum_i s_i(A_lambda)^r is recorded; the increments
//! ("shells") of that sequence decay geometrically for operators in the
//! Schatten class and flatten or grow otherwise. The fitted log2 slope of
//! the shells is the primary classifier; a growth ratio of the partial sums
//! separates harmonic-type divergence from slow convergence when the slope
//! lands in the dead band.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::linalg::CMat;
use crate::quantize::{assemble_matrix, OperatorMatrix};
use crate::symbol::MatrixSymbol;
use crate::window::TruncationWindow;

/// lambda_j = base * 2^j, j = 0..rungs.
pub fn dyadic_ladder(base: f64, rungs: usize) -> Vec<f64> {
    (0..rungs).map(|j| base * (1u64 << j) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Convergent => write!(f, "convergent"),
            Verdict::Divergent => write!(f, "divergent"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Decision constants for the tail classifier. The shell slopes are decisive
/// outside (shell_convergent, shell_divergent); inside that band the growth
/// ratio g = (v_last - v_mid) / (v_mid - v_first) takes over: bounded partial
/// sums give g well below 1/2 + epsilon, while logarithmic growth gives
/// g near (last - mid) / mid > 0.6 on ladders of 8 or more rungs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VerdictThresholds {
    pub shell_convergent: f64,
    pub shell_divergent: f64,
    pub growth_divergent: f64,
    pub growth_convergent: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            shell_convergent: -0.25,
            shell_divergent: 0.25,
            growth_divergent: 0.6,
            growth_convergent: 0.55,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailAnalysis {
    /// log2 slope of the positive shells; None when the shells vanish.
    pub exponent: Option<f64>,
    /// (v_last - v_mid) / (v_mid - v_first); None when the denominator is
    /// not positive.
    pub growth_ratio: Option<f64>,
    pub verdict: Verdict,
}

/// Classify a nondecreasing sequence of partial values sampled on a ratio-2
/// ladder. Needs at least 4 rungs.
pub fn analyze_tail(pairs: &[(f64, f64)], th: &VerdictThresholds) -> Result<TailAnalysis> {
    if pairs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "tail classification needs at least 4 dyadic rungs, got {}",
            pairs.len()
        )));
    }
    for w in pairs.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        if !(a > 0.0) || (b / a - 2.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "ladder must have ratio 2 between rungs, got {a} -> {b}"
            )));
        }
    }
    let values: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite partial value on the ladder".into()));
    }

    let mut ks = Vec::new();
    let mut logs = Vec::new();
    for (k, w) in values.windows(2).enumerate() {
        let shell = w[1] - w[0];
        if shell > 0.0 {
            ks.push(k as f64);
            logs.push(shell.log2());
        }
    }

    let exponent = if logs.len() >= 2 {
        let (slope, _, _) = crate::linalg::least_squares_line(&ks, &logs)?;
        Some(slope)
    } else {
        None
    };

    let mid = values.len() / 2;
    let denom = values[mid] - values[0];
    let num = values[values.len() - 1] - values[mid];
    let growth_ratio = if denom > 0.0 { Some(num / denom) } else { None };

    let verdict = match exponent {
        None => Verdict::Convergent, // shells vanished: the sum has settled
        Some(e) if e <= th.shell_convergent => Verdict::Convergent,
        Some(e) if e >= th.shell_divergent => Verdict::Divergent,
        Some(_) => match growth_ratio {
            None => {
                if num > 0.0 {
                    Verdict::Divergent // flat early, growing late
                } else {
                    Verdict::Convergent
                }
            }
            Some(g) if g >= th.growth_divergent => Verdict::Divergent,
            Some(g) if g <= th.growth_convergent => Verdict::Convergent,
            Some(_) => Verdict::Inconclusive,
        },
    };
    Ok(TailAnalysis {
        exponent,
        growth_ratio,
        verdict,
    })
}

/// Geometric extrapolation of the limit: v_last + shell * rho / (1 - rho)
/// with rho = 2^exponent. Only meaningful for convergent tails.
fn richardson(values: &[f64], exponent: f64) -> Option<f64> {
    let n = values.len();
    let shell = values[n - 1] - values[n - 2];
    let rho = exponent.exp2();
    if shell > 0.0 && rho > 0.0 && rho < 1.0 {
        Some(values[n - 1] + shell * rho / (1.0 - rho))
    } else {
        None
    }
}

/// Descending singular values of an assembled operator.
pub fn singular_values(op: &OperatorMatrix) -> Result<Vec<f64>> {
    crate::linalg::singular_values_of(&op.entries)
}

/// sum_i s_i^r over a dense operator, returned as the norm (1/r power).
pub fn operator_schatten_norm(op: &OperatorMatrix, r: f64) -> Result<f64> {
    let sv = singular_values(op)?;
    if r.is_infinite() {
        return Ok(crate::linalg::operator_norm_from_svals(&sv));
    }
    Ok(crate::linalg::power_sum(&sv, r).powf(1.0 / r))
}

/// Singular values of the block-diagonal operator of an invariant symbol,
/// as (value, multiplicity) pairs sorted descending. Never materializes the
/// operator: each dual contributes svals(sigma(xi)) with multiplicity d_xi
/// (scalar parts contribute one value with multiplicity d_xi^2).
pub fn compressed_invariant_svals(
    s: &MatrixSymbol,
    w: &TruncationWindow,
) -> Result<Vec<(f64, usize)>> {
    w.check_same_group(&s.group)?;
    if !s.is_invariant() {
        return Err(Error::Unsupported(
            "compressed spectra apply to invariant symbols only".into(),
        ));
    }
    let per_dual: Vec<Vec<(f64, usize)>> = w
        .duals()
        .par_iter()
        .map(|xi| -> Result<Vec<(f64, usize)>> {
            match s.eval_out_invariant(xi)? {
                crate::symbol::EvalOut::Scalar(v, d) => Ok(vec![(v.norm(), d * d)]),
                crate::symbol::EvalOut::Matrix(m) => {
                    let sv = crate::linalg::singular_values_of(&m)?;
                    Ok(sv.into_iter().map(|v| (v, xi.dim)).collect())
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all: Vec<(f64, usize)> = per_dual.into_iter().flatten().collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(all)
}

pub fn schatten_norm_from_compressed(vals: &[(f64, usize)], r: f64) -> f64 {
    if r.is_infinite() {
        return vals.iter().map(|v| v.0).fold(0.0, f64::max);
    }
    vals.iter()
        .map(|(v, m)| *m as f64 * v.powf(r))
        .sum::<f64>()
        .powf(1.0 / r)
}

/// Ladder study of ||A_lambda||_{S_r}^r for the operator with the given
/// symbol. Invariant symbols stay in per-dual form; x-dependent symbols are
/// assembled once at the top rung and truncated downward (each smaller
/// window is a principal submatrix, so the power sums are nondecreasing).
#[derive(Clone, Debug, Serialize)]
pub struct SchattenReport {
    pub label: String,
    pub r: f64,
    pub ladder: Vec<f64>,
    pub partial_power_sums: Vec<f64>,
    pub partial_norms: Vec<f64>,
    pub fitted_tail_exponent: Option<f64>,
    pub growth_ratio: Option<f64>,
    pub verdict: Verdict,
    pub extrapolated_value: Option<f64>,
    pub thresholds: VerdictThresholds,
}

pub fn schatten_report(
    s: &MatrixSymbol,
    r: f64,
    ladder: &[f64],
    th: &VerdictThresholds,
) -> Result<SchattenReport> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Config(format!(
            "ladder studies need a finite positive exponent, got {r}"
        )));
    }
    if ladder.is_empty() {
        return Err(Error::InsufficientData("empty truncation ladder".into()));
    }
    let top = *ladder.last().unwrap();
    let w = TruncationWindow::new(s.group, top)?;
    let brackets: Vec<f64> = w.duals().iter().map(|d| d.bracket()).collect();

    let partial_power_sums: Vec<f64> = if s.is_invariant() {
        let terms: Vec<f64> = w
            .duals()
            .par_iter()
            .map(|xi| -> Result<f64> {
                let ev = s.eval_out_invariant(xi)?;
                Ok(xi.dim as f64 * ev.schatten_power(r)?)
            })
            .collect::<Result<Vec<_>>>()?;
        ladder
            .iter()
            .map(|&lam| {
                terms
                    .iter()
                    .zip(brackets.iter())
                    .filter(|(_, b)| **b <= lam)
                    .map(|(t, _)| *t)
                    .sum()
            })
            .collect()
    } else {
        let op = assemble_matrix(s, &w, None)?;
        ladder
            .iter()
            .map(|&lam| -> Result<f64> {
                let idx: Vec<usize> = (0..w.total_dim)
                    .filter(|&col| {
                        let (di, _, _) = w.column_label(col);
                        brackets[di] <= lam
                    })
                    .collect();
                if idx.is_empty() {
                    return Ok(0.0);
                }
                let sub = CMat::from_fn(idx.len(), idx.len(), |a, b| {
                    op.entries[(idx[a], idx[b])]
                });
                let sv = crate::linalg::singular_values_of(&sub)?;
                Ok(crate::linalg::power_sum(&sv, r))
            })
            .collect::<Result<Vec<_>>>()?
    };

    let partial_norms: Vec<f64> = partial_power_sums.iter().map(|v| v.powf(1.0 / r)).collect();
    let pairs: Vec<(f64, f64)> = ladder
        .iter()
        .copied()
        .zip(partial_power_sums.iter().copied())
        .collect();
    let tail = analyze_tail(&pairs, th)?;
    let extrapolated_value = match (tail.verdict, tail.exponent) {
        (Verdict::Convergent, Some(e)) => richardson(&partial_power_sums, e),
        _ => None,
    };
    Ok(SchattenReport {
        label: s.label().to_string(),
        r,
        ladder: ladder.to_vec(),
        partial_power_sums,
        partial_norms,
        fitted_tail_exponent: tail.exponent,
        growth_ratio: tail.growth_ratio,
        verdict: tail.verdict,
        extrapolated_value,
        thresholds: *th,
    })
}

/// Partial sums of sum_xi d_xi^2 <xi>^{-s} along a ladder: the dual series
/// whose convergence (exactly when s exceeds the group dimension) controls
/// the summability arguments behind the order thresholds.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub group: Group,
    pub exponent: f64,
    pub ladder: Vec<f64>,
    pub partials: Vec<f64>,
    pub fitted_tail_exponent: Option<f64>,
    pub growth_ratio: Option<f64>,
    pub verdict: Verdict,
    pub thresholds: VerdictThresholds,
}

pub fn lemma_series(
    group: Group,
    s: f64,
    ladder: &[f64],
    th: &VerdictThresholds,
) -> Result<SeriesReport> {
    if ladder.is_empty() {
        return Err(Error::InsufficientData("empty truncation ladder".into()));
    }
    let top = *ladder.last().unwrap();
    let duals = group.enumerate_dual(top)?;
    let data: Vec<(f64, f64)> = duals
        .iter()
        .map(|xi| {
            let d = xi.dim as f64;
            (xi.bracket(), d * d * xi.bracket().powf(-s))
        })
        .collect();
    let partials: Vec<f64> = ladder
        .iter()
        .map(|&lam| {
            data.iter()
                .filter(|(b, _)| *b <= lam)
                .map(|(_, t)| *t)
                .sum()
        })
        .collect();
    let pairs: Vec<(f64, f64)> = ladder.iter().copied().zip(partials.iter().copied()).collect();
    let tail = analyze_tail(&pairs, th)?;
    Ok(SeriesReport {
        group,
        exponent: s,
        ladder: ladder.to_vec(),
        partials,
        fitted_tail_exponent: tail.exponent,
        growth_ratio: tail.growth_ratio,
        verdict: tail.verdict,
        thresholds: *th,
    })
}
