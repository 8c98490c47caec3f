//! Quantization: from symbols to concrete operators on a truncated window.
//!
//! Conventions, fixed once:
//!   forward   fhat(xi) = int f(x) xi(x)^* dx        (entrywise: int f conj(xi_ba))
//!   inverse   f(x)     = sum_xi d_xi Tr[xi(x) fhat(xi)]
//!   operator  (Af)(x)  = sum_xi d_xi Tr[xi(x) sigma(x, xi) fhat(xi)]
//!
//! The orthonormal basis indexing operator matrices is b_{(xi,i,j)} =
//! sqrt(d_xi) xi_ij, laid out block by block in window order with (i, j)
//! row-major inside each block. An invariant symbol then assembles to
//! M[(xi,k,l),(xi,i,j)] = delta_ki sigma(xi)_lj and nothing off the diagonal
//! blocks; the quadrature path reproduces this without assuming it.

use std::io::{BufRead, Write as IoWrite};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{DualIndex, Group, GroupPoint, QuadratureGrid};
use crate::linalg::{c64, C64, CMat};
use crate::symbol::MatrixSymbol;
use crate::window::TruncationWindow;

/// Smallest grid resolution that integrates exactly: two window factors plus
/// the symbol's x-band (all in coordinate units).
pub fn required_resolution(window_band: usize, x_band: usize) -> usize {
    2 * window_band + x_band + 1
}

/// Fourier coefficients of a scalar function over one window.
#[derive(Debug)]
pub struct FourierCoefficients {
    pub window: TruncationWindow,
    /// One d_xi x d_xi block per dual point, in window order.
    pub blocks: Vec<CMat>,
}

impl FourierCoefficients {
    /// sum_xi d_xi ||fhat(xi)||_HS^2, the dual side of the Plancherel
    /// identity.
    pub fn plancherel_sum(&self) -> f64 {
        self.window
            .duals()
            .iter()
            .zip(self.blocks.iter())
            .map(|(xi, b)| xi.dim as f64 * crate::linalg::frobenius_sq(b))
            .sum()
    }
}

/// Project f onto the window by quadrature. The grid must resolve products
/// of two window representations; with f itself band-limited to the window
/// the coefficients are then exact up to rounding.
pub fn fourier_forward<F>(
    group: Group,
    f: F,
    window: &TruncationWindow,
    grid: &QuadratureGrid,
) -> Result<FourierCoefficients>
where
    F: Fn(&GroupPoint) -> C64 + Sync,
{
    window.check_same_group(&group)?;
    if grid.group != group {
        return Err(Error::Mismatch(
            "quadrature grid and window live on different groups".into(),
        ));
    }
    let wb = window.coordinate_band();
    let need = required_resolution(wb, 0);
    if grid.resolution < need {
        return Err(Error::Aliasing {
            required: need,
            got: grid.resolution,
            context: "fourier_forward over the window".into(),
        });
    }
    let samples: Vec<C64> = grid.nodes.iter().map(&f).collect();
    let blocks: Vec<CMat> = window
        .duals()
        .par_iter()
        .map(|xi| -> Result<CMat> {
            let mut acc = CMat::zeros(xi.dim, xi.dim);
            for ((x, w), fv) in grid.nodes.iter().zip(grid.weights.iter()).zip(samples.iter()) {
                let rep = group.rep_matrix(xi, x)?;
                acc += rep.adjoint() * (fv * c64(*w, 0.0));
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierCoefficients {
        window: window.clone(),
        blocks,
    })
}

/// Evaluate the inversion sum at one point.
pub fn fourier_inverse(coeffs: &FourierCoefficients, x: &GroupPoint) -> Result<C64> {
    let group = coeffs.window.group;
    let mut acc = c64(0.0, 0.0);
    for (xi, block) in coeffs.window.duals().iter().zip(coeffs.blocks.iter()) {
        let rep = group.rep_matrix(xi, x)?;
        acc += (rep * block).trace() * c64(xi.dim as f64, 0.0);
    }
    Ok(acc)
}

/// Apply the operator with the given symbol to the function represented by
/// `coeffs`, at one point.
pub fn apply_op(
    s: &MatrixSymbol,
    coeffs: &FourierCoefficients,
    x: &GroupPoint,
) -> Result<C64> {
    coeffs.window.check_same_group(&s.group)?;
    let group = s.group;
    let mut acc = c64(0.0, 0.0);
    for (xi, block) in coeffs.window.duals().iter().zip(coeffs.blocks.iter()) {
        let rep = group.rep_matrix(xi, x)?;
        let sigma = s.eval(x, xi)?;
        acc += (rep * sigma * block).trace() * c64(xi.dim as f64, 0.0);
    }
    Ok(acc)
}

/// Truncated Schwartz kernel K(x, y) = sum_xi d_xi Tr[xi(y^{-1} x) sigma(x, xi)].
pub fn schwartz_kernel(
    s: &MatrixSymbol,
    window: &TruncationWindow,
    x: &GroupPoint,
    y: &GroupPoint,
) -> Result<C64> {
    window.check_same_group(&s.group)?;
    let group = s.group;
    let z = group.multiply(&group.inverse(y)?, x)?;
    let mut acc = c64(0.0, 0.0);
    for xi in window.duals() {
        let rep = group.rep_matrix(xi, &z)?;
        let sigma = s.eval(x, xi)?;
        acc += (rep * sigma).trace() * c64(xi.dim as f64, 0.0);
    }
    Ok(acc)
}

/// Dense matrix of the truncated operator in the orthonormal window basis.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub window: TruncationWindow,
    pub entries: CMat,
    pub label: String,
}

impl OperatorMatrix {
    /// K(x, y) of the truncated matrix itself: expand over both bases.
    pub fn kernel(&self, x: &GroupPoint, y: &GroupPoint) -> Result<C64> {
        let group = self.window.group;
        let n = self.window.total_dim;
        // b_col evaluated at y (conjugated) and b_row at x
        let mut at_x = vec![c64(0.0, 0.0); n];
        let mut at_y = vec![c64(0.0, 0.0); n];
        for (di, xi) in self.window.duals().iter().enumerate() {
            let off = self.window.offset(di);
            let scale = c64((xi.dim as f64).sqrt(), 0.0);
            let rx = group.rep_matrix(xi, x)?;
            let ry = group.rep_matrix(xi, y)?;
            for i in 0..xi.dim {
                for j in 0..xi.dim {
                    at_x[off + i * xi.dim + j] = scale * rx[(i, j)];
                    at_y[off + i * xi.dim + j] = scale * ry[(i, j)];
                }
            }
        }
        let mut acc = c64(0.0, 0.0);
        for row in 0..n {
            for col in 0..n {
                let m = self.entries[(row, col)];
                if m != c64(0.0, 0.0) {
                    acc += at_x[row] * m * at_y[col].conj();
                }
            }
        }
        Ok(acc)
    }

    /// Serialize as one JSON header line, a CSV column header, then one line
    /// per structurally nonzero entry with full-precision floats.
    pub fn write_to(&self, out: &mut dyn IoWrite) -> Result<()> {
        let header = ExportHeader {
            label: self.label.clone(),
            group: self.window.group,
            lambda: self.window.lambda,
            total_dim: self.window.total_dim,
            duals: self
                .window
                .duals()
                .iter()
                .map(|d| d.index.clone())
                .collect(),
            layout: LAYOUT_NOTE.into(),
        };
        writeln!(out, "{}", serde_json::to_string(&header)?)?;
        writeln!(out, "row,col,re,im")?;
        for row in 0..self.window.total_dim {
            for col in 0..self.window.total_dim {
                let v = self.entries[(row, col)];
                if v != c64(0.0, 0.0) {
                    writeln!(out, "{row},{col},{:.16e},{:.16e}", v.re, v.im)?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from(input: &mut dyn BufRead) -> Result<OperatorMatrix> {
        let mut header_line = String::new();
        input.read_line(&mut header_line)?;
        let header: ExportHeader = serde_json::from_str(header_line.trim_end())?;
        let window = TruncationWindow::new(header.group, header.lambda)?;
        if window.total_dim != header.total_dim {
            return Err(Error::Mismatch(format!(
                "window rebuilt from header has dimension {}, header says {}",
                window.total_dim, header.total_dim
            )));
        }
        let rebuilt: Vec<DualIndex> = window.duals().iter().map(|d| d.index.clone()).collect();
        if rebuilt != header.duals {
            return Err(Error::Mismatch(
                "dual enumeration in header does not match this build".into(),
            ));
        }
        let mut entries = CMat::zeros(window.total_dim, window.total_dim);
        let mut lines = String::new();
        input.read_to_string(&mut lines)?;
        for (lineno, line) in lines.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line == "row,col,re,im" {
                continue;
            }
            let mut it = line.split(',');
            let parse_err = |what: &str| {
                Error::Parse(format!("entry line {}: missing {what}", lineno + 2))
            };
            let row: usize = it
                .next()
                .ok_or_else(|| parse_err("row"))?
                .parse()
                .map_err(|e| Error::Parse(format!("row on line {}: {e}", lineno + 2)))?;
            let col: usize = it
                .next()
                .ok_or_else(|| parse_err("col"))?
                .parse()
                .map_err(|e| Error::Parse(format!("col on line {}: {e}", lineno + 2)))?;
            let re: f64 = it
                .next()
                .ok_or_else(|| parse_err("re"))?
                .parse()
                .map_err(|e| Error::Parse(format!("re on line {}: {e}", lineno + 2)))?;
            let im: f64 = it
                .next()
                .ok_or_else(|| parse_err("im"))?
                .parse()
                .map_err(|e| Error::Parse(format!("im on line {}: {e}", lineno + 2)))?;
            if row >= window.total_dim || col >= window.total_dim {
                return Err(Error::Parse(format!(
                    "entry ({row},{col}) outside a {} x {} matrix",
                    window.total_dim, window.total_dim
                )));
            }
            entries[(row, col)] = c64(re, im);
        }
        Ok(OperatorMatrix {
            window,
            entries,
            label: header.label,
        })
    }
}

const LAYOUT_NOTE: &str =
    "basis sqrt(d) xi_ij; blocks in window order; (i,j) row-major within each block";

#[derive(Serialize, Deserialize)]
struct ExportHeader {
    label: String,
    group: Group,
    lambda: f64,
    total_dim: usize,
    duals: Vec<DualIndex>,
    layout: String,
}

/// Assemble the operator matrix. Invariant symbols take the exact
/// block-diagonal route; x-dependent symbols go through quadrature at the
/// smallest exact resolution (or `resolution` if given).
pub fn assemble_matrix(
    s: &MatrixSymbol,
    window: &TruncationWindow,
    resolution: Option<usize>,
) -> Result<OperatorMatrix> {
    window.check_same_group(&s.group)?;
    if s.is_invariant() {
        let n = window.total_dim;
        let mut entries = CMat::zeros(n, n);
        for (di, xi) in window.duals().iter().enumerate() {
            let off = window.offset(di);
            let d = xi.dim;
            let sigma = s.eval_invariant(xi)?;
            // M[(k,l),(i,j)] = delta_ki sigma_lj
            for i in 0..d {
                for l in 0..d {
                    for j in 0..d {
                        let v = sigma[(l, j)];
                        if v != c64(0.0, 0.0) {
                            entries[(off + i * d + l, off + i * d + j)] = v;
                        }
                    }
                }
            }
        }
        return Ok(OperatorMatrix {
            window: window.clone(),
            entries,
            label: s.label().to_string(),
        });
    }
    let wb = window.coordinate_band();
    let need = required_resolution(wb, s.x_band());
    let res = resolution.unwrap_or(need);
    if res < need {
        return Err(Error::Aliasing {
            required: need,
            got: res,
            context: "assembling an x-dependent symbol".into(),
        });
    }
    let grid = s.group.haar_quadrature(res)?;
    assemble_matrix_via_quadrature(s, window, &grid)
}

/// Column-by-column assembly through the quantization formula and the
/// forward transform; never assumes invariance. Grid must satisfy
/// `required_resolution(window band, symbol x-band)`.
pub fn assemble_matrix_via_quadrature(
    s: &MatrixSymbol,
    window: &TruncationWindow,
    grid: &QuadratureGrid,
) -> Result<OperatorMatrix> {
    window.check_same_group(&s.group)?;
    if grid.group != s.group {
        return Err(Error::Mismatch(
            "quadrature grid and symbol live on different groups".into(),
        ));
    }
    let wb = window.coordinate_band();
    let need = required_resolution(wb, s.x_band());
    if grid.resolution < need {
        return Err(Error::Aliasing {
            required: need,
            got: grid.resolution,
            context: "assembling through quadrature".into(),
        });
    }
    let group = s.group;
    let n = window.total_dim;
    let duals = window.duals();

    // representation matrices at every node, reused across all columns
    let reps: Vec<Vec<CMat>> = grid
        .nodes
        .par_iter()
        .map(|x| -> Result<Vec<CMat>> {
            duals.iter().map(|xi| group.rep_matrix(xi, x)).collect()
        })
        .collect::<Result<Vec<_>>>()?;

    // per column group (one dual xi): P(x) = xi(x) sigma(x, xi) at every
    // node, then rows of each column (i, j) by the forward transform of
    // g(x) = sqrt(d) P(x)_ij
    let col_blocks: Vec<Vec<(usize, Vec<C64>)>> = duals
        .par_iter()
        .enumerate()
        .map(|(ci, xi)| -> Result<Vec<(usize, Vec<C64>)>> {
            let d = xi.dim;
            let scale = (d as f64).sqrt();
            let mut products: Vec<CMat> = Vec::with_capacity(grid.nodes.len());
            for (ni, x) in grid.nodes.iter().enumerate() {
                let sigma = s.eval(x, xi)?;
                products.push(&reps[ni][ci] * sigma);
            }
            let mut cols = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    let col_index = window.offset(ci) + i * d + j;
                    let mut column = vec![c64(0.0, 0.0); n];
                    for (ri, eta) in duals.iter().enumerate() {
                        let de = eta.dim;
                        let mut block = CMat::zeros(de, de);
                        for (ni, w) in grid.weights.iter().enumerate() {
                            let g = products[ni][(i, j)] * c64(scale * w, 0.0);
                            block += reps[ni][ri].adjoint() * g;
                        }
                        let row_scale = c64((de as f64).sqrt(), 0.0);
                        for k in 0..de {
                            for l in 0..de {
                                // <Op b_col, sqrt(de) eta_kl> = sqrt(de) ghat(eta)_lk
                                column[window.offset(ri) + k * de + l] =
                                    row_scale * block[(l, k)];
                            }
                        }
                    }
                    cols.push((col_index, column));
                }
            }
            Ok(cols)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut entries = CMat::zeros(n, n);
    for group_cols in col_blocks {
        for (col, column) in group_cols {
            for (row, v) in column.into_iter().enumerate() {
                entries[(row, col)] = v;
            }
        }
    }
    Ok(OperatorMatrix {
        window: window.clone(),
        entries,
        label: s.label().to_string(),
    })
}

/// Recover sigma(x, xi) from an assembled matrix:
/// sigma(x, xi) = xi(x)^* (A xi)(x), entry (i, j) of (A xi)(x) being the
/// matrix applied to the entry function xi_ij evaluated at x.
pub fn extract_symbol(
    op: &OperatorMatrix,
    x: &GroupPoint,
    xi_index: &DualIndex,
) -> Result<CMat> {
    let group = op.window.group;
    let duals = op.window.duals();
    let di = duals
        .iter()
        .position(|d| &d.index == xi_index)
        .ok_or_else(|| Error::Mismatch(format!("dual point {xi_index:?} not in the window")))?;
    let xi = &duals[di];
    let d = xi.dim;
    let inv_scale = (d as f64).sqrt().recip();

    // basis functions at x, once
    let n = op.window.total_dim;
    let mut basis_at_x = vec![c64(0.0, 0.0); n];
    for (ri, eta) in duals.iter().enumerate() {
        let rep = group.rep_matrix(eta, x)?;
        let scale = c64((eta.dim as f64).sqrt(), 0.0);
        let off = op.window.offset(ri);
        for k in 0..eta.dim {
            for l in 0..eta.dim {
                basis_at_x[off + k * eta.dim + l] = scale * rep[(k, l)];
            }
        }
    }

    let mut a_xi = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let col = op.window.offset(di) + i * d + j;
            let mut acc = c64(0.0, 0.0);
            for row in 0..n {
                let m = op.entries[(row, col)];
                if m != c64(0.0, 0.0) {
                    acc += basis_at_x[row] * m;
                }
            }
            a_xi[(i, j)] = acc * c64(inv_scale, 0.0);
        }
    }
    let rep_x = group.rep_matrix(xi, x)?;
    Ok(rep_x.adjoint() * a_xi)
}
