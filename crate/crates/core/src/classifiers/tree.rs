//! CART-style binary decision tree with the Gini split criterion.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::MatrixView;

/// Gini impurity of a two-class node: `1 - p0^2 - p1^2`.
pub fn gini(n_benign: usize, n_attack: usize) -> Result<f64> {
    let n = n_benign + n_attack;
    if n == 0 {
        return Err(Error::InvalidInput("gini of an empty node".into()));
    }
    let p0 = n_benign as f64 / n as f64;
    let p1 = n_attack as f64 / n as f64;
    Ok(1.0 - p0 * p0 - p1 * p1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        attack_fraction: f64,
        sample_count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Candidate features per node; `None` means all of them.
    pub m_try: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            m_try: None,
            max_depth: None,
            min_samples_leaf: 1,
        }
    }
}

/// Nodes are stored flat; index 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    n_features: usize,
    nodes: Vec<TreeNode>,
}

struct Best {
    feature: usize,
    threshold: f64,
    /// sum over children of (a^2 + b^2) / n; larger is purer.
    purity: f64,
}

struct Work {
    slot: usize,
    start: usize,
    end: usize,
    depth: usize,
}

impl DecisionTree {
    /// Trains on every row of `view`.
    pub fn fit<R: Rng>(view: MatrixView<'_>, cfg: &TreeConfig, rng: &mut R) -> Result<Self> {
        let samples: Vec<usize> = (0..view.len()).collect();
        Self::fit_samples(view, samples, cfg, rng)
    }

    /// Trains on `samples`, positions into `view` (duplicates allowed, as
    /// produced by bootstrap resampling).
    ///
    /// Greedy top-down growth. At each node the candidate features are
    /// scanned in ascending index order and thresholds in ascending order;
    /// a candidate replaces the incumbent only if strictly purer, so ties
    /// resolve to the lowest feature index and then the lowest threshold.
    /// A node becomes a leaf when it is pure, at `max_depth`, or when no
    /// threshold leaves `min_samples_leaf` rows on both sides. Splits with
    /// zero impurity decrease are accepted (XOR-like data needs them).
    pub fn fit_samples<R: Rng>(
        view: MatrixView<'_>,
        mut samples: Vec<usize>,
        cfg: &TreeConfig,
        rng: &mut R,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("cannot train a tree on zero rows".into()));
        }
        if cfg.min_samples_leaf == 0 {
            return Err(Error::Config("min_samples_leaf must be positive".into()));
        }
        let d = view.n_features();
        let m_try = cfg.m_try.unwrap_or(d).clamp(1, d);
        let labels: Vec<u8> = view.labels();
        let mut nodes = vec![TreeNode::Leaf {
            attack_fraction: 0.0,
            sample_count: 0,
        }];
        let mut stack = vec![Work {
            slot: 0,
            start: 0,
            end: samples.len(),
            depth: 0,
        }];
        let mut pairs: Vec<(f64, u8)> = Vec::with_capacity(samples.len());

        while let Some(w) = stack.pop() {
            let node = &samples[w.start..w.end];
            let n = node.len();
            let n_attack = node.iter().filter(|&&s| labels[s] == 1).count();
            let leaf = TreeNode::Leaf {
                attack_fraction: n_attack as f64 / n as f64,
                sample_count: n,
            };
            let pure = n_attack == 0 || n_attack == n;
            let depth_capped = cfg.max_depth.is_some_and(|m| w.depth >= m);
            if pure || depth_capped || n < 2 * cfg.min_samples_leaf {
                nodes[w.slot] = leaf;
                continue;
            }

            let mut features: Vec<usize> = if m_try >= d {
                (0..d).collect()
            } else {
                index::sample(rng, d, m_try).into_vec()
            };
            features.sort_unstable();

            let mut best: Option<Best> = None;
            for &f in &features {
                pairs.clear();
                pairs.extend(node.iter().map(|&s| (view.row(s)[f], labels[s])));
                pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
                let total_a = n_attack as f64;
                let total_b = (n - n_attack) as f64;
                let mut left_a = 0.0f64;
                let mut left_b = 0.0f64;
                for i in 0..n - 1 {
                    if pairs[i].1 == 1 {
                        left_a += 1.0;
                    } else {
                        left_b += 1.0;
                    }
                    let n_left = i + 1;
                    if pairs[i].0 == pairs[i + 1].0 {
                        continue;
                    }
                    if n_left < cfg.min_samples_leaf || n - n_left < cfg.min_samples_leaf {
                        continue;
                    }
                    let nl = n_left as f64;
                    let nr = (n - n_left) as f64;
                    let ra = total_a - left_a;
                    let rb = total_b - left_b;
                    let purity = (left_a * left_a + left_b * left_b) / nl + (ra * ra + rb * rb) / nr;
                    if best.as_ref().is_none_or(|b| purity > b.purity) {
                        let lo = pairs[i].0;
                        let hi = pairs[i + 1].0;
                        let mut threshold = lo + (hi - lo) / 2.0;
                        if threshold >= hi {
                            threshold = lo;
                        }
                        best = Some(Best {
                            feature: f,
                            threshold,
                            purity,
                        });
                    }
                }
            }

            let Some(best) = best else {
                nodes[w.slot] = leaf;
                continue;
            };

            // partition samples[start..end] in place: left side first
            let seg = &mut samples[w.start..w.end];
            let mut mid = 0;
            for i in 0..seg.len() {
                if view.row(seg[i])[best.feature] <= best.threshold {
                    seg.swap(i, mid);
                    mid += 1;
                }
            }
            debug_assert!(mid > 0 && mid < seg.len());
            let left = nodes.len();
            let right = left + 1;
            nodes.push(leaf.clone());
            nodes.push(leaf);
            nodes[w.slot] = TreeNode::Split {
                feature: best.feature,
                threshold: best.threshold,
                left: left as u32,
                right: right as u32,
            };
            // right pushed first so the left subtree is grown first
            stack.push(Work {
                slot: right,
                start: w.start + mid,
                end: w.end,
                depth: w.depth + 1,
            });
            stack.push(Work {
                slot: left,
                start: w.start,
                end: w.start + mid,
                depth: w.depth + 1,
            });
        }
        Ok(DecisionTree { n_features: d, nodes })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Index of the leaf reached by `x`.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0usize;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { .. } => return i,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[*feature] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    /// Attack fraction of the leaf reached by `x`.
    pub fn score_row(&self, x: &[f64]) -> f64 {
        match &self.nodes[self.leaf_index(x)] {
            TreeNode::Leaf { attack_fraction, .. } => *attack_fraction,
            TreeNode::Split { .. } => unreachable!(),
        }
    }

    pub fn depth(&self) -> usize {
        let mut max = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            max = max.max(d);
            if let TreeNode::Split { left, right, .. } = &self.nodes[i] {
                stack.push((*left as usize, d + 1));
                stack.push((*right as usize, d + 1));
            }
        }
        max
    }
}
