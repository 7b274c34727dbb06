//! Declarative experiment configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::{ModelKind, TrainConfig};
use crate::error::{Error, Result};
use crate::flowdata::{ColumnSpec, FeatureSchema, RowPolicy};
use crate::par::Exec;
use crate::preprocess::{FitScope, UnseenPolicy};

/// Which matrix the distance analysis reads.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WdInput {
    /// Encoded and min-max scaled; every feature lies in `[0, 1]`.
    #[default]
    Scaled,
    /// Encoded only.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WdConfig {
    pub input: WdInput,
    /// Per-side row cap for the distance computation.
    pub max_rows: usize,
    /// Ignore `max_rows` and use every row.
    pub exact: bool,
}

impl Default for WdConfig {
    fn default() -> Self {
        WdConfig {
            input: WdInput::Scaled,
            max_rows: 100_000,
            exact: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Relative paths are resolved against the config file's directory.
    pub path: PathBuf,
    pub benign_name: String,
    #[serde(default)]
    pub invalid_rows: RowPolicy,
    pub columns: Vec<ColumnSpec>,
}

impl DatasetConfig {
    pub fn schema(&self) -> Result<FeatureSchema> {
        FeatureSchema::new(self.columns.clone()).map_err(|e| match e {
            Error::Schema(m) => Error::Config(format!("dataset.columns: {m}")),
            other => other,
        })
    }
}

fn default_folds() -> usize {
    5
}

fn default_models() -> Vec<ModelKind> {
    vec![ModelKind::Forest, ModelKind::Mlp]
}

fn default_threshold() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Required: every random choice derives from it.
    pub seed: u64,
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// Empty runs the distance analysis only.
    #[serde(default = "default_models")]
    pub models: Vec<ModelKind>,
    /// Held-out classes to evaluate; empty means every attack class.
    #[serde(default)]
    pub classes: Vec<String>,
    #[serde(default)]
    pub fit_scope: FitScope,
    #[serde(default)]
    pub unseen: UnseenPolicy,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Seeded uniform row cap applied right after loading.
    #[serde(default)]
    pub subsample: Option<usize>,
    /// Record per-scenario failures and continue instead of aborting.
    #[serde(default)]
    pub keep_going: bool,
    /// Worker threads; 0 uses every available CPU.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub execution: Exec,
    /// Write every trained model under `models/`.
    #[serde(default)]
    pub save_models: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub dataset: Option<DatasetConfig>,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub wd: WdConfig,
}

impl ExperimentConfig {
    /// Defaults for everything but the seed, no dataset.
    pub fn new(seed: u64) -> Self {
        ExperimentConfig {
            seed,
            folds: default_folds(),
            models: default_models(),
            classes: Vec::new(),
            fit_scope: FitScope::default(),
            unseen: UnseenPolicy::default(),
            threshold: default_threshold(),
            subsample: None,
            keep_going: false,
            workers: 0,
            execution: Exec::default(),
            save_models: false,
            output: None,
            dataset: None,
            train: TrainConfig::default(),
            wd: WdConfig::default(),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file; dataset and output paths are
    /// made relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(ds) = &mut cfg.dataset {
            if ds.path.is_relative() {
                ds.path = base.join(&ds.path);
            }
        }
        if let Some(out) = &mut cfg.output {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Config(format!("folds must be at least 2, got {}", self.folds)));
        }
        let mut seen = Vec::new();
        for m in &self.models {
            if seen.contains(m) {
                return Err(Error::Config(format!("model {} listed twice", m.as_str())));
            }
            seen.push(*m);
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!("threshold {} outside [0, 1]", self.threshold)));
        }
        if self.subsample == Some(0) {
            return Err(Error::Config("subsample must be positive".into()));
        }
        if self.wd.max_rows == 0 {
            return Err(Error::Config("wd.max_rows must be positive".into()));
        }
        self.train.validate()?;
        if let Some(ds) = &self.dataset {
            ds.schema()?;
            if ds.benign_name.trim().is_empty() {
                return Err(Error::Config("dataset.benign_name is empty".into()));
            }
        }
        Ok(())
    }

    pub fn wd_max_rows(&self) -> Option<usize> {
        (!self.wd.exact).then_some(self.wd.max_rows)
    }
}
