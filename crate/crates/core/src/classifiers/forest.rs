//! Random forest of Gini trees on bootstrap resamples.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeConfig};
use super::{row_chunks, ScoreVector};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::preprocess::MatrixView;
use crate::rng;

const FOREST_SALT: u64 = 0xF0_4E57;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features considered per split; `None` means ceil(sqrt(d)).
    pub m_try: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Disabling bootstrap trains every tree on the full row set.
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 50,
            m_try: None,
            max_depth: None,
            min_samples_leaf: 1,
            bootstrap: true,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Config("forest.n_trees must be positive".into()));
        }
        if self.m_try == Some(0) {
            return Err(Error::Config("forest.m_try must be positive".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::Config("forest.max_depth must be positive".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::Config("forest.min_samples_leaf must be positive".into()));
        }
        Ok(())
    }

    pub fn resolved_m_try(&self, d: usize) -> usize {
        self.m_try
            .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
            .clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForestModel {
    n_features: usize,
    m_try: usize,
    /// Tree `i` drew its randomness from stream `i` of this key.
    seed: u64,
    trees: Vec<DecisionTree>,
}

impl RandomForestModel {
    pub fn fit(view: MatrixView<'_>, cfg: &ForestConfig, seed: u64) -> Result<Self> {
        Self::fit_with(view, cfg, seed, Exec::default())
    }

    /// Trees are independent: each gets its own random stream, so the
    /// result is identical under sequential and parallel execution.
    pub fn fit_with(view: MatrixView<'_>, cfg: &ForestConfig, seed: u64, exec: Exec) -> Result<Self> {
        cfg.validate()?;
        if view.is_empty() {
            return Err(Error::InvalidInput("cannot train a forest on zero rows".into()));
        }
        let d = view.n_features();
        let m_try = cfg.resolved_m_try(d);
        let tree_cfg = TreeConfig {
            m_try: Some(m_try),
            max_depth: cfg.max_depth,
            min_samples_leaf: cfg.min_samples_leaf,
        };
        let key = rng::derive_seed(seed, FOREST_SALT);
        let n = view.len();
        let trees = exec
            .map_range(cfg.n_trees, |t| {
                let mut r = rng::stream(key, t as u64);
                let samples: Vec<usize> = if cfg.bootstrap {
                    (0..n).map(|_| r.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::fit_samples(view, samples, &tree_cfg, &mut r)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(RandomForestModel {
            n_features: d,
            m_try,
            seed: key,
            trees,
        })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn m_try(&self) -> usize {
        self.m_try
    }

    pub fn score_row(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.score_row(x)).sum();
        (sum / self.trees.len() as f64).clamp(0.0, 1.0)
    }

    pub fn score(&self, view: MatrixView<'_>) -> Result<ScoreVector> {
        self.score_with(view, Exec::default())
    }

    pub fn score_with(&self, view: MatrixView<'_>, exec: Exec) -> Result<ScoreVector> {
        if view.n_features() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: view.n_features(),
            });
        }
        let chunks = row_chunks(view.len());
        let parts = exec.map(&chunks, |&(a, b)| (a..b).map(|i| self.score_row(view.row(i))).collect::<Vec<_>>());
        ScoreVector::new(parts.concat())
    }
}
