//! From-scratch binary classifiers emitting attack scores in `[0, 1]`.
//!
//! * [`forest`]: bagged Gini decision trees ([`tree`]), score = mean leaf
//!   attack fraction.
//! * [`mlp`]: ReLU perceptron with a sigmoid output trained by mini-batch
//!   SGD on binary cross-entropy.
//!
//! Both trainers are deterministic for a given seed.

pub mod forest;
pub mod mlp;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::preprocess::MatrixView;

pub use forest::{ForestConfig, RandomForestModel};
pub use mlp::{MlpConfig, MlpModel, TrainHistory};
pub use tree::{gini, DecisionTree, TreeConfig, TreeNode};

/// Current version of the serialized model document.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Forest,
    Mlp,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Forest => "forest",
            ModelKind::Mlp => "mlp",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "forest" | "rf" => Ok(ModelKind::Forest),
            "mlp" => Ok(ModelKind::Mlp),
            other => Err(Error::Config(format!("unknown model {other:?} (expected forest or mlp)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub forest: ForestConfig,
    pub mlp: MlpConfig,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.forest.validate()?;
        self.mlp.validate()
    }
}

/// Per-row attack scores, every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some(bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::InvalidInput(format!("score {bad} outside [0, 1]")));
        }
        Ok(ScoreVector(scores))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Hard labels: 1 iff score >= threshold.
pub fn predict(scores: &ScoreVector, threshold: f64) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidInput(format!("threshold {threshold} outside [0, 1]")));
    }
    Ok(scores.0.iter().map(|&s| u8::from(s >= threshold)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrainedModel {
    Forest(RandomForestModel),
    Mlp(MlpModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Forest(_) => ModelKind::Forest,
            TrainedModel::Mlp(_) => ModelKind::Mlp,
        }
    }

    pub fn train(kind: ModelKind, view: MatrixView<'_>, cfg: &TrainConfig, seed: u64, exec: Exec) -> Result<Self> {
        match kind {
            ModelKind::Forest => Ok(TrainedModel::Forest(RandomForestModel::fit_with(view, &cfg.forest, seed, exec)?)),
            ModelKind::Mlp => Ok(TrainedModel::Mlp(MlpModel::fit(view, &cfg.mlp, seed)?.0)),
        }
    }

    pub fn score(&self, view: MatrixView<'_>, exec: Exec) -> Result<ScoreVector> {
        match self {
            TrainedModel::Forest(m) => m.score_with(view, exec),
            TrainedModel::Mlp(m) => m.score_with(view, exec),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelDoc {
            format_version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(s)?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "model format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                doc.format_version
            )));
        }
        Ok(doc.model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format_version: u32,
    model: TrainedModel,
}

/// Splits `0..n` into contiguous chunks for row-parallel scoring.
pub(crate) fn row_chunks(n: usize) -> Vec<(usize, usize)> {
    const CHUNK: usize = 2048;
    (0..n.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(n)))
        .collect()
}
