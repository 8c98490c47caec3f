//! Spectral truncation windows: the finite slice of the dual with
//! <xi> <= lambda, together with the induced orthonormal basis
//! sqrt(d_xi) xi_ij of its span in L^2(G).
//!
//! Basis columns are ordered canonically: dual points in enumeration order,
//! then (i, j) in row-major order within each representation. Every matrix
//! the quantizer produces uses this layout, which is what makes exports and
//! reductions bit-reproducible.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{DualIndex, DualPoint, Group};

#[derive(Clone, Debug)]
pub struct TruncationWindow {
    pub group: Group,
    pub lambda: f64,
    duals: Vec<DualPoint>,
    offsets: Vec<usize>,
    by_index: HashMap<DualIndex, usize>,
    pub total_dim: usize,
}

impl TruncationWindow {
    pub fn new(group: Group, lambda: f64) -> Result<Self> {
        let duals = group.enumerate_dual(lambda)?;
        let mut offsets = Vec::with_capacity(duals.len());
        let mut by_index = HashMap::with_capacity(duals.len());
        let mut acc = 0usize;
        for (i, d) in duals.iter().enumerate() {
            offsets.push(acc);
            acc += d.dim * d.dim;
            by_index.insert(d.index.clone(), i);
        }
        Ok(TruncationWindow {
            group,
            lambda,
            duals,
            offsets,
            by_index,
            total_dim: acc,
        })
    }

    pub fn duals(&self) -> &[DualPoint] {
        &self.duals
    }

    pub fn offset(&self, dual_idx: usize) -> usize {
        self.offsets[dual_idx]
    }

    /// Column of basis function sqrt(d) xi_ij (zero-based i, j).
    pub fn basis_index(&self, dual_idx: usize, i: usize, j: usize) -> usize {
        let d = self.duals[dual_idx].dim;
        debug_assert!(i < d && j < d);
        self.offsets[dual_idx] + i * d + j
    }

    /// Position of a dual point in the window, if present.
    pub fn locate(&self, xi: &DualPoint) -> Option<usize> {
        self.by_index.get(&xi.index).copied()
    }

    /// (dual index, i, j) for a basis column.
    pub fn column_label(&self, col: usize) -> (usize, usize, usize) {
        debug_assert!(col < self.total_dim);
        // offsets are sorted; binary search for the owning block
        let dual_idx = match self.offsets.binary_search(&col) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let d = self.duals[dual_idx].dim;
        let rel = col - self.offsets[dual_idx];
        (dual_idx, rel / d, rel % d)
    }

    /// Largest coordinate band among the window's representations; grids must
    /// resolve twice this (plus any symbol band) to assemble without aliasing.
    pub fn coordinate_band(&self) -> usize {
        self.duals
            .iter()
            .map(|d| d.coordinate_band())
            .max()
            .unwrap_or(0)
    }

    pub fn check_same_group(&self, g: &Group) -> Result<()> {
        if self.group == *g {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "window over {} used with {}",
                self.group, g
            )))
        }
    }
}
