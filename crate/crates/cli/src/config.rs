use std::path::{Path, PathBuf};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use schatten_core::linalg::{c64, CMat};
use schatten_core::quantize::FourierCoefficients;
use schatten_core::spectral::VerdictThresholds;
use schatten_core::symbol::MatrixSymbol;
use schatten_core::{DualPoint, Error, Group, Result, TruncationWindow};

/// One run, fully specified: everything a command needs to be replayed
/// byte-for-byte. The echo written to each output directory blanks `output`
/// so the artifacts do not depend on where they were put.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: Group,
    pub symbol: SymbolSpec,
    /// Truncation rungs, strictly increasing; ratio-2 wherever a verdict is
    /// requested downstream.
    pub ladder: Vec<f64>,
    #[serde(default)]
    pub r_values: Vec<f64>,
    /// Quadrature override for assembly and sampling.
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub thresholds: VerdictThresholds,
    #[serde(default)]
    pub criteria: Vec<CriterionSpec>,
    /// Input function for `quantize`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    /// Exponents for `series`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum SymbolSpec {
    Bessel { m: f64 },
    Dyadic { kappa: f64 },
    Random { decay: f64 },
    Zero,
    Coefficient { modes: Vec<ModeSpec>, base: Box<SymbolSpec> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub freq: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum CriterionSpec {
    /// Consistency of the measured summability of <xi>^m with the strict
    /// order threshold; ignores the configured symbol.
    OrderThresholdSweep { m: f64, r: f64 },
    /// Claimed ideal membership of the configured symbol, checked against
    /// the measured verdict.
    SchattenMembership {
        r: f64,
        #[serde(default = "default_claim")]
        claim: bool,
    },
    Russo { p: f64, lambda: f64 },
    Regularity {
        #[serde(rename = "N")]
        big_n: f64,
        p: f64,
    },
    Elliptic { lambda: f64 },
}

fn default_claim() -> bool {
    true
}

/// Band-limited input for `quantize`: either explicit torus modes or random
/// coefficients drawn from the run seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeSpec>,
    #[serde(default)]
    pub random: bool,
}

pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if cfg.ladder.is_empty() {
        return Err(Error::Config("ladder must not be empty".into()));
    }
    if cfg.ladder.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Config("ladder must be strictly increasing".into()));
    }
    Ok(cfg)
}

pub fn build_symbol(spec: &SymbolSpec, group: Group, seed: u64) -> Result<MatrixSymbol> {
    match spec {
        SymbolSpec::Bessel { m } => Ok(MatrixSymbol::bessel(group, *m)),
        SymbolSpec::Dyadic { kappa } => match group {
            Group::Torus { dim } => MatrixSymbol::dyadic(dim, *kappa),
            Group::Su2 => Err(Error::Unsupported(
                "the lacunary symbol is a torus construction".into(),
            )),
        },
        SymbolSpec::Random { decay } => Ok(MatrixSymbol::random_real_multiplier(
            group, seed, *decay,
        )),
        SymbolSpec::Zero => Ok(MatrixSymbol::zero(group)),
        SymbolSpec::Coefficient { modes, base } => {
            let base = build_symbol(base, group, seed)?;
            let modes: Vec<(Vec<i64>, schatten_core::linalg::C64)> = modes
                .iter()
                .map(|m| (m.freq.clone(), c64(m.re, m.im)))
                .collect();
            MatrixSymbol::coefficient(&modes, &base)
        }
    }
}

pub fn build_function(
    spec: &FunctionSpec,
    group: Group,
    seed: u64,
) -> Result<FourierCoefficients> {
    let window = TruncationWindow::new(group, spec.lambda)?;
    if !spec.modes.is_empty() {
        if !matches!(group, Group::Torus { .. }) {
            return Err(Error::Unsupported(
                "explicit function modes are defined on the torus".into(),
            ));
        }
        let mut blocks: Vec<CMat> = window
            .duals()
            .iter()
            .map(|xi| CMat::zeros(xi.dim, xi.dim))
            .collect();
        for m in &spec.modes {
            let xi = DualPoint::torus(m.freq.clone());
            let idx = window.locate(&xi).ok_or_else(|| {
                Error::Config(format!(
                    "function mode {:?} lies outside the window at lambda = {}",
                    m.freq, spec.lambda
                ))
            })?;
            blocks[idx][(0, 0)] += c64(m.re, m.im);
        }
        return Ok(FourierCoefficients { window, blocks });
    }
    if spec.random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut unit = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let blocks = window
            .duals()
            .iter()
            .map(|xi| {
                CMat::from_fn(xi.dim, xi.dim, |_, _| {
                    c64(2.0 * unit() - 1.0, 2.0 * unit() - 1.0)
                })
            })
            .collect();
        return Ok(FourierCoefficients { window, blocks });
    }
    Err(Error::Config(
        "function spec needs either modes or random = true".into(),
    ))
}

/// Provenance copy embedded in every artifact: the run minus its location.
pub fn echo(cfg: &RunConfig) -> RunConfig {
    let mut c = cfg.clone();
    c.output = None;
    c
}
