//! Fully connected ReLU network with a single sigmoid output unit.
//!
//! Training minimizes mean binary cross-entropy with plain mini-batch SGD
//! (no momentum, no regularization). The loss is computed from the output
//! logit so that saturated sigmoids never produce `ln(0)`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{row_chunks, ScoreVector};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::preprocess::MatrixView;
use crate::rng;

const MLP_SALT: u64 = 0x3A1F_0C0D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    /// Widths of the hidden ReLU layers, input side first.
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: vec![100, 100],
            learning_rate: 0.01,
            batch_size: 256,
            epochs: 30,
        }
    }
}

impl MlpConfig {
    /// A learning rate of exactly 0 is accepted; it turns training into a
    /// no-op, which is occasionally useful for checking the pipeline.
    pub fn validate(&self) -> Result<()> {
        if self.hidden.contains(&0) {
            return Err(Error::Config("mlp.hidden widths must be positive".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Config(format!(
                "mlp.learning_rate must be a non-negative number, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("mlp.batch_size must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("mlp.epochs must be positive".into()));
        }
        Ok(())
    }
}

/// `weights` is row-major `n_in x n_out`: the weight from input `i` to
/// unit `o` is `weights[i * n_out + o]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl DenseLayer {
    fn zeros(n_in: usize, n_out: usize) -> Self {
        DenseLayer {
            n_in,
            n_out,
            weights: vec![0.0; n_in * n_out],
            biases: vec![0.0; n_out],
        }
    }

    /// `out[r] = x[r] W + b` for a row-major batch `x` of `rows x n_in`.
    fn affine(&self, x: &[f64], rows: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows * self.n_out);
        for _ in 0..rows {
            out.extend_from_slice(&self.biases);
        }
        for r in 0..rows {
            let xr = &x[r * self.n_in..(r + 1) * self.n_in];
            let or = &mut out[r * self.n_out..(r + 1) * self.n_out];
            for (i, &xi) in xr.iter().enumerate() {
                if xi == 0.0 {
                    continue;
                }
                let wi = &self.weights[i * self.n_out..(i + 1) * self.n_out];
                for (o, w) in or.iter_mut().zip(wi) {
                    *o += xi * w;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    n_inputs: usize,
    /// Hidden layers followed by the 1-unit output layer.
    layers: Vec<DenseLayer>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Mean training loss per epoch, each batch measured before its update.
    pub epoch_losses: Vec<f64>,
    /// Number of SGD steps taken.
    pub updates: usize,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-[y ln s(z) + (1-y) ln(1 - s(z))]` evaluated as `softplus(z) - y z`.
fn bce_from_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p() - y * z
}

impl MlpModel {
    /// Glorot-uniform weights, zero biases.
    pub fn init(n_inputs: usize, hidden: &[usize], seed: u64) -> Result<Self> {
        let mut model = Self::zeros(n_inputs, hidden)?;
        let mut r = rng::stream(rng::derive_seed(seed, MLP_SALT), 0);
        for layer in &mut model.layers {
            let limit = (6.0 / (layer.n_in + layer.n_out) as f64).sqrt();
            for w in &mut layer.weights {
                *w = r.random_range(-limit..=limit);
            }
        }
        Ok(model)
    }

    /// All weights and biases zero.
    pub fn zeros(n_inputs: usize, hidden: &[usize]) -> Result<Self> {
        if n_inputs == 0 {
            return Err(Error::InvalidInput("mlp needs at least one input".into()));
        }
        if hidden.contains(&0) {
            return Err(Error::InvalidInput("hidden layer widths must be positive".into()));
        }
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut prev = n_inputs;
        for &w in hidden.iter().chain(std::iter::once(&1)) {
            layers.push(DenseLayer::zeros(prev, w));
            prev = w;
        }
        Ok(MlpModel { n_inputs, layers })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Flat parameter vector: per layer, weights then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            p.extend_from_slice(&l.weights);
            p.extend_from_slice(&l.biases);
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                expected: self.n_params(),
                actual: p.len(),
            });
        }
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&p[at..at + nw]);
            at += nw;
            let nb = l.biases.len();
            l.biases.copy_from_slice(&p[at..at + nb]);
            at += nb;
        }
        Ok(())
    }

    /// Activations of every layer for a batch. Entry 0 is the input; the
    /// hidden entries are post-ReLU; the last entry holds output logits.
    fn forward_batch(&self, x: Vec<f64>, rows: usize) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x);
        let last = self.layers.len() - 1;
        for (li, layer) in self.layers.iter().enumerate() {
            let mut z = layer.affine(acts.last().unwrap(), rows);
            if li < last {
                for v in &mut z {
                    *v = v.max(0.0);
                }
            }
            acts.push(z);
        }
        acts
    }

    fn check_row(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs,
                actual: x.len(),
            });
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite input value {bad}")));
        }
        Ok(())
    }

    /// Output logit for one row.
    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        self.check_row(x)?;
        Ok(self.forward_batch(x.to_vec(), 1).pop().unwrap()[0])
    }

    /// Attack score `sigmoid(logit)` for one row.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.logit(x)?))
    }

    fn gather(view: MatrixView<'_>, rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let mut x = Vec::with_capacity(rows.len() * view.n_features());
        let mut y = Vec::with_capacity(rows.len());
        for &r in rows {
            x.extend_from_slice(view.row(r));
            y.push(f64::from(view.label(r)));
        }
        (x, y)
    }

    /// Mean cross-entropy over `rows` of `view` and its gradient with
    /// respect to [`params`](Self::params), by backpropagation.
    pub fn loss_and_gradient(&self, view: MatrixView<'_>, rows: &[usize]) -> Result<(f64, Vec<f64>)> {
        if view.n_features() != self.n_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs,
                actual: view.n_features(),
            });
        }
        if rows.is_empty() {
            return Err(Error::InvalidInput("loss over zero rows".into()));
        }
        let b = rows.len();
        let (x, y) = Self::gather(view, rows);
        let acts = self.forward_batch(x, b);
        let logits = acts.last().unwrap();
        let inv_b = 1.0 / b as f64;
        let loss = logits.iter().zip(&y).map(|(&z, &t)| bce_from_logit(z, t)).sum::<f64>() * inv_b;

        // d loss / d logit = (sigmoid(z) - y) / B
        let mut delta: Vec<f64> = logits.iter().zip(&y).map(|(&z, &t)| (sigmoid(z) - t) * inv_b).collect();
        let mut grads: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(self.layers.len());
        for li in (0..self.layers.len()).rev() {
            let layer = &self.layers[li];
            let input = &acts[li];
            let (n_in, n_out) = (layer.n_in, layer.n_out);
            let mut gw = vec![0.0; n_in * n_out];
            let mut gb = vec![0.0; n_out];
            for r in 0..b {
                let dr = &delta[r * n_out..(r + 1) * n_out];
                for (g, d) in gb.iter_mut().zip(dr) {
                    *g += d;
                }
                for (i, &xi) in input[r * n_in..(r + 1) * n_in].iter().enumerate() {
                    if xi == 0.0 {
                        continue;
                    }
                    for (g, d) in gw[i * n_out..(i + 1) * n_out].iter_mut().zip(dr) {
                        *g += xi * d;
                    }
                }
            }
            if li > 0 {
                // back through W, then through the ReLU of the layer below
                let mut prev = vec![0.0; b * n_in];
                for r in 0..b {
                    let dr = &delta[r * n_out..(r + 1) * n_out];
                    for i in 0..n_in {
                        if input[r * n_in + i] <= 0.0 {
                            continue;
                        }
                        let wi = &layer.weights[i * n_out..(i + 1) * n_out];
                        prev[r * n_in + i] = wi.iter().zip(dr).map(|(w, d)| w * d).sum();
                    }
                }
                delta = prev;
            }
            grads.push((gw, gb));
        }
        let mut flat = Vec::with_capacity(self.n_params());
        for (gw, gb) in grads.into_iter().rev() {
            flat.extend(gw);
            flat.extend(gb);
        }
        Ok((loss, flat))
    }

    /// Mean cross-entropy over `rows` of `view`.
    pub fn loss(&self, view: MatrixView<'_>, rows: &[usize]) -> Result<f64> {
        if view.n_features() != self.n_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs,
                actual: view.n_features(),
            });
        }
        let (x, y) = Self::gather(view, rows);
        let logits = self.forward_batch(x, rows.len()).pop().unwrap();
        Ok(logits.iter().zip(&y).map(|(&z, &t)| bce_from_logit(z, t)).sum::<f64>() / rows.len() as f64)
    }

    /// Trains from a fresh [`init`](Self::init). Rows are reshuffled every
    /// epoch from an epoch-specific stream; the final batch of an epoch may
    /// be short. Epoch and batch numbers in errors are 1-based.
    pub fn fit(view: MatrixView<'_>, cfg: &MlpConfig, seed: u64) -> Result<(Self, TrainHistory)> {
        cfg.validate()?;
        if view.is_empty() {
            return Err(Error::InvalidInput("cannot train an mlp on zero rows".into()));
        }
        let mut model = Self::init(view.n_features(), &cfg.hidden, seed)?;
        let key = rng::derive_seed(seed, MLP_SALT);
        let n = view.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut history = TrainHistory::default();
        let mut params = model.params();

        for epoch in 0..cfg.epochs {
            let mut r = rng::stream(key, epoch as u64 + 1);
            order.shuffle(&mut r);
            let mut weighted = 0.0;
            for (bi, batch) in order.chunks(cfg.batch_size).enumerate() {
                let (loss, grad) = model.loss_and_gradient(view, batch)?;
                let nonfinite = || Error::NonFiniteLoss {
                    epoch: epoch + 1,
                    batch: bi + 1,
                };
                if !loss.is_finite() {
                    return Err(nonfinite());
                }
                weighted += loss * batch.len() as f64;
                for (p, g) in params.iter_mut().zip(&grad) {
                    *p -= cfg.learning_rate * g;
                }
                if params.iter().any(|p| !p.is_finite()) {
                    return Err(nonfinite());
                }
                model.set_params(&params)?;
                history.updates += 1;
            }
            let mean = weighted / n as f64;
            log::debug!("mlp epoch {}: loss {mean:.6}", epoch + 1);
            history.epoch_losses.push(mean);
        }
        Ok((model, history))
    }

    pub fn score(&self, view: MatrixView<'_>) -> Result<ScoreVector> {
        self.score_with(view, Exec::default())
    }

    pub fn score_with(&self, view: MatrixView<'_>, exec: Exec) -> Result<ScoreVector> {
        if view.n_features() != self.n_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs,
                actual: view.n_features(),
            });
        }
        let chunks = row_chunks(view.len());
        let parts = exec.map(&chunks, |&(a, b)| -> Result<Vec<f64>> {
            let mut x = Vec::with_capacity((b - a) * self.n_inputs);
            for i in a..b {
                let row = view.row(i);
                self.check_row(row)?;
                x.extend_from_slice(row);
            }
            let logits = self.forward_batch(x, b - a).pop().unwrap();
            Ok(logits.into_iter().map(sigmoid).collect())
        });
        let mut scores = Vec::with_capacity(view.len());
        for p in parts {
            scores.extend(p?);
        }
        ScoreVector::new(scores)
    }
}
