//! Small complex linear-algebra kernels shared by the symbol, quantizer, and
//! spectral layers. Everything routes through singular values; matrix square
//! roots are never formed.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMat = DMatrix<C64>;

const SVD_MAX_SWEEPS: usize = 20_000;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Exact structural check; used to route diagonal matrices (multipliers on the
/// torus, scalar symbols on SU(2)) around the dense SVD.
pub fn is_diagonal(m: &CMat) -> bool {
    let (rows, cols) = m.shape();
    if rows != cols {
        return false;
    }
    for j in 0..cols {
        for i in 0..rows {
            if i != j {
                let z = m[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    return false;
                }
            }
        }
    }
    true
}

fn sort_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    v
}

/// Singular values in descending order. Diagonal input short-circuits to the
/// moduli of its diagonal; the result is identical to the dense route up to
/// ordering because the singular values of a diagonal matrix are exactly those
/// moduli.
pub fn singular_values_of(m: &CMat) -> Result<Vec<f64>> {
    if !all_finite(m) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    if is_diagonal(m) {
        return Ok(sort_desc(m.diagonal().iter().map(|z| z.norm()).collect()));
    }
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, SVD_MAX_SWEEPS)
        .ok_or_else(|| Error::Numeric("SVD failed to converge".into()))?;
    Ok(sort_desc(svd.singular_values.iter().copied().collect()))
}

/// `|M|^pow` where `|M| = (M* M)^{1/2}`, computed as `V diag(s^pow) V*` from
/// the SVD `M = U diag(s) V*`. Diagonal input stays diagonal with entries
/// `|m_ii|^pow`.
pub fn abs_power(m: &CMat, pow: f64) -> Result<CMat> {
    if !all_finite(m) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    if m.nrows() != m.ncols() {
        return Err(Error::Mismatch(format!(
            "abs_power needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if is_diagonal(m) {
        let n = m.nrows();
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = c64(m[(i, i)].norm().powf(pow), 0.0);
        }
        return Ok(out);
    }
    let svd = m
        .clone()
        .try_svd(false, true, f64::EPSILON, SVD_MAX_SWEEPS)
        .ok_or_else(|| Error::Numeric("SVD failed to converge".into()))?;
    let vt = svd.v_t.expect("requested V^T");
    let v = vt.adjoint();
    let n = m.nrows();
    let mut scaled = v.clone();
    for j in 0..n {
        let s = svd.singular_values[j].powf(pow);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    Ok(&scaled * &vt)
}

/// `sum_i s_i^p` over a descending (or any) list of singular values.
/// `p = inf` returns the largest value instead.
pub fn power_sum(svals: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return svals.iter().copied().fold(0.0, f64::max);
    }
    svals.iter().map(|s| s.powf(p)).sum()
}

pub fn hs_norm_from_svals(svals: &[f64]) -> f64 {
    power_sum(svals, 2.0).sqrt()
}

pub fn operator_norm_from_svals(svals: &[f64]) -> f64 {
    svals.iter().copied().fold(0.0, f64::max)
}

pub fn frobenius_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Least-squares line fit `y = slope*x + intercept`; also returns the RMS
/// residual. Errors when fewer than two points or the x values coincide.
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::Mismatch("fit arrays differ in length".into()));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData(
            "need at least two points for a line fit".into(),
        ));
    }
    let xm = xs.iter().sum::<f64>() / n as f64;
    let ym = ys.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for k in 0..n {
        sxx += (xs[k] - xm) * (xs[k] - xm);
        sxy += (xs[k] - xm) * (ys[k] - ym);
    }
    if sxx == 0.0 {
        return Err(Error::UndefinedFit("zero variance in fit abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let mut ss = 0.0;
    for k in 0..n {
        let r = ys[k] - slope * xs[k] - intercept;
        ss += r * r;
    }
    Ok((slope, intercept, (ss / n as f64).sqrt()))
}
