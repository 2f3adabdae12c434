//! Strict run configuration. Every random quantity derives from `seed`.

use std::path::{Path, PathBuf};

use ldproj_core::{DirectionMode, DistributionSpec, RateKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dist: DistributionSpec,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmgf: Option<LmgfConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Csv
}

/// `min, min + step, …, max`; `(max − min)/step` must be an integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridConfig {
    /// Points as `k/m` when `step = 1/m`, otherwise `(min (N − i) + max i) / N`;
    /// either way symmetric grids hit 0 exactly and the end points are exact.
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let GridConfig { min, max, step } = *self;
        if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || max < min {
            return Err(CliError::config(format!("bad grid {min}..{max} step {step}")));
        }
        let span = (max - min) / step;
        let count = span.round();
        if (span - count).abs() > 1e-9 * span.max(1.0) || count > 1e6 {
            return Err(CliError::config(format!("grid span {} is not a whole number of steps {step}", max - min)));
        }
        let n = count as usize;
        if n == 0 {
            return Ok(vec![min]);
        }
        // for steps 1/m with min a multiple of the step, k/m is the double
        // nearest the decimal grid value
        let inv = 1.0 / step;
        let k0 = min * inv;
        if (inv - inv.round()).abs() < 1e-9 * inv && (k0 - k0.round()).abs() < 1e-9 * k0.abs().max(1.0) {
            let (m, k0) = (inv.round(), k0.round());
            return Ok((0..=n).map(|i| (k0 + i as f64) / m).collect());
        }
        Ok((0..=n).map(|i| (min * (n - i) as f64 + max * i as f64) / n as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub grid: GridConfig,
    #[serde(default = "both_kinds")]
    pub kinds: Vec<RateKind>,
}

fn both_kinds() -> Vec<RateKind> {
    vec![RateKind::CramerRate, RateKind::UniversalRate]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub grid: GridConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub mode: DirectionMode,
    pub w: f64,
    pub n_set: Vec<usize>,
    pub samples: usize,
    #[serde(default = "default_chunk")]
    pub chunk_size: usize,
    /// Rate compared against `rate_hat` in the summary; defaults to the
    /// Cramér rate for the constant direction and the universal rate otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<RateKind>,
    /// Also write each direction row (one value per line) with a JSON sidecar.
    #[serde(default)]
    pub export_rows: bool,
}

fn default_chunk() -> usize {
    ldproj_core::mc::DEFAULT_CHUNK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LmgfConfig {
    pub mode: DirectionMode,
    pub t_set: Vec<f64>,
    pub n_set: Vec<usize>,
    /// Seeds `seed, seed + 1, …` (wrapping).
    #[serde(default = "one")]
    pub seed_count: u64,
    #[serde(default = "default_e1_n_set")]
    pub e1_n_set: Vec<usize>,
}

fn one() -> u64 {
    1
}

fn default_e1_n_set() -> Vec<usize> {
    vec![100, 10_000, 1_000_000]
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))
    }

    /// SHA-256 of the canonical JSON of the configuration without its output
    /// section, so the hash names the experiment rather than where it was written.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let canonical = serde_json::to_vec(&c).expect("configuration serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn section<'a, T>(&self, name: &str, s: &'a Option<T>) -> Result<&'a T, CliError> {
        s.as_ref().ok_or_else(|| CliError::config(format!("config has no \"{name}\" section")))
    }
}
