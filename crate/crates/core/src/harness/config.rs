//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::models::{Iid, ProcessModel};
use crate::series::IndexPair;

/// IID laws `(½ + c/√n, ½ − c/√n)`, one per sample size, with margin
/// `δ_n = 2c/√n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginFamily {
    pub scale: f64,
}

impl MarginFamily {
    pub fn model_at(&self, n: usize) -> Result<ProcessModel> {
        let h = self.scale / (n as f64).sqrt();
        Ok(ProcessModel::Iid(Iid::new(vec![0.5 + h, 0.5 - h])?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsOptions {
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DkwOptions {
    /// Deviation `u` of the concentration inequality.
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeCamOptions {
    /// Alphabet size of the two-point construction; 0 means unbounded.
    pub alphabet: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsOptions {
    /// Exponent of the long-range Ising potential.
    pub alpha: f64,
    pub k_max: usize,
}

fn yes() -> bool {
    true
}

/// Which analyses run for every grid point. A present section turns its
/// analysis on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analyses {
    #[serde(default = "yes")]
    pub risk: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dkw: Option<DkwOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lecam: Option<LeCamOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gibbs: Option<GibbsOptions>,
}

impl Default for Analyses {
    fn default() -> Self {
        Analyses { risk: true, bounds: None, dkw: None, lecam: None, gibbs: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// A fixed model, or `None` when `margin_family` supplies one per `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ProcessModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin_family: Option<MarginFamily>,
    #[serde(rename = "D")]
    pub data: Vec<i64>,
    #[serde(rename = "G")]
    pub guess: Vec<i64>,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    /// Master seed. There is deliberately no default.
    pub seed: u64,
    #[serde(default)]
    pub analyses: Analyses,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn pair(&self) -> Result<IndexPair> {
        IndexPair::new(&self.data, &self.guess)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.model, &self.margin_family) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return Err(Error::InvalidArgument("exactly one of `model` and `margin_family` must be given".into())),
        }
        if let Some(f) = &self.margin_family {
            if !(f.scale > 0.0 && f.scale < 0.5) {
                return Err(Error::InvalidArgument(format!("margin family scale must lie in (0, ½), got {}", f.scale)));
            }
        }
        self.pair()?;
        if self.n_grid.is_empty() {
            return Err(Error::InvalidArgument("n_grid must not be empty".into()));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("n_grid must be positive and strictly increasing".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be at least 1".into()));
        }
        if let Some(b) = &self.analyses.bounds {
            if b.epsilon.is_nan() || b.epsilon <= 0.0 {
                return Err(Error::InvalidArgument("bounds.epsilon must be positive".into()));
            }
        }
        if let Some(d) = &self.analyses.dkw {
            if !(d.u >= 0.0 && d.u.is_finite()) {
                return Err(Error::InvalidArgument("dkw.u must be finite and non-negative".into()));
            }
        }
        if let Some(l) = &self.analyses.lecam {
            if l.alphabet == 1 {
                return Err(Error::InvalidArgument("lecam.alphabet must be 0 (unbounded) or at least 2".into()));
            }
        }
        Ok(())
    }

    /// Model used at sample size `n`.
    pub fn model_at(&self, n: usize) -> Result<ProcessModel> {
        match (&self.model, &self.margin_family) {
            (Some(m), _) => Ok(m.clone()),
            (None, Some(f)) => f.model_at(n),
            (None, None) => Err(Error::InvalidArgument("no model configured".into())),
        }
    }

    /// SHA-256 of the canonical (sorted-key, compact) JSON of everything but
    /// the output paths, as lowercase hex.
    pub fn hash(&self) -> Result<String> {
        let mut bare = self.clone();
        bare.outputs = Outputs::default();
        let canonical = serde_json::to_string(&serde_json::to_value(&bare)?)?;
        Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
    }
}
