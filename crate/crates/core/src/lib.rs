//! Numerical laboratory for pseudo-differential operators on compact groups.
//!
//! The crate builds matrix-valued symbols on the torus T^n and on SU(2),
//! quantizes them against spectral truncation windows, and measures Schatten
//! properties of the resulting operators: singular spectra, partial-sum
//! ladders with convergence verdicts, and the summability/regularity criteria
//! that decide membership in a Schatten ideal.
//!
//! Layering, bottom up:
//! - [`group`]: groups, dual enumeration, representation matrices, Haar rules;
//! - [`window`]: truncation windows and the canonical basis layout;
//! - [`symbol`]: matrix symbols, difference operators, dual-side norms;
//! - [`quantize`]: Fourier transforms, operator assembly, symbol extraction;
//! - [`spectral`]: singular spectra, Schatten partial sums, tail verdicts;
//! - [`criteria`]: membership criteria, inequality checks, sphere averages.

pub mod criteria;
pub mod error;
pub mod group;
pub mod linalg;
pub mod quantize;
pub mod spectral;
pub mod symbol;
pub mod window;

pub use error::{Error, Result};
pub use group::{DualIndex, DualPoint, Group, GroupPoint, QuadratureGrid};
pub use window::TruncationWindow;
