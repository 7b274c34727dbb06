//! Seeded Gaussian-blob flow tables for tests and desk-scale runs.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::classifiers::MlpConfig;
use crate::error::{Error, Result};
use crate::flowdata::{Column, ColumnKind, ColumnSpec, FeatureSchema, FlowTable};
use crate::rng;

pub const SYNTH_BENIGN: &str = "Benign";
const SYNTH_SALT: u64 = 0x5_1A7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticClass {
    pub name: String,
    pub count: usize,
    /// Blob centre, length `d`.
    pub mean: Vec<f64>,
    /// Standard deviation on every dimension.
    pub scale: f64,
    /// Distribution shift added to the centre; empty means none.
    #[serde(default)]
    pub offset: Vec<f64>,
}

impl SyntheticClass {
    pub fn centre(&self) -> Vec<f64> {
        if self.offset.is_empty() {
            return self.mean.clone();
        }
        self.mean.iter().zip(&self.offset).map(|(m, o)| m + o).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub d: usize,
    pub n_benign: usize,
    pub benign_mean: Vec<f64>,
    pub benign_scale: f64,
    pub classes: Vec<SyntheticClass>,
    pub seed: u64,
    /// Add a `flow_id` identifier column and a class-independent `proto`
    /// categorical column, so the full preprocessing path is exercised.
    #[serde(default)]
    pub extra_columns: bool,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Config("synthetic d must be at least 1".into()));
        }
        let check = |what: &str, v: &[f64], scale: f64| -> Result<()> {
            if v.len() != self.d {
                return Err(Error::Config(format!("{what}: mean has {} entries, d = {}", v.len(), self.d)));
            }
            if !(scale.is_finite() && scale >= 0.0) || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!("{what}: mean and scale must be finite, scale >= 0")));
            }
            Ok(())
        };
        check("benign", &self.benign_mean, self.benign_scale)?;
        let mut names = vec![SYNTH_BENIGN];
        for c in &self.classes {
            check(&c.name, &c.mean, c.scale)?;
            if !c.offset.is_empty() && c.offset.len() != self.d {
                return Err(Error::Config(format!("{}: offset length must be d", c.name)));
            }
            if c.name.trim().is_empty() || names.contains(&c.name.as_str()) {
                return Err(Error::Config(format!("synthetic class name {:?} is empty or repeated", c.name)));
            }
            names.push(&c.name);
        }
        Ok(())
    }

    pub fn feature_names(&self) -> Vec<String> {
        (0..self.d).map(|j| format!("f{j}")).collect()
    }

    pub fn schema(&self) -> FeatureSchema {
        let mut cols = Vec::new();
        if self.extra_columns {
            cols.push(ColumnSpec::new("flow_id", ColumnKind::Identifier));
        }
        cols.extend(self.feature_names().into_iter().map(|n| ColumnSpec::new(n, ColumnKind::Numeric)));
        if self.extra_columns {
            cols.push(ColumnSpec::new("proto", ColumnKind::Categorical));
        }
        cols.push(ColumnSpec::new("label", ColumnKind::BinaryLabel));
        cols.push(ColumnSpec::new("attack_cat", ColumnKind::AttackClass));
        FeatureSchema::new(cols).expect("synthetic schema is valid")
    }

    pub fn n_rows(&self) -> usize {
        self.n_benign + self.classes.iter().map(|c| c.count).sum::<usize>()
    }

    /// Well separated blobs: 1000 benign rows around the origin and three
    /// 200-row attack classes around distinct corners, d = 10.
    pub fn separable(seed: u64) -> Self {
        let d = 10;
        let corner = |sign: [f64; 2]| -> Vec<f64> {
            (0..d).map(|j| if j < 5 { 4.0 * sign[0] } else { 4.0 * sign[1] }).collect()
        };
        let class = |name: &str, mean: Vec<f64>| SyntheticClass {
            name: name.into(),
            count: 200,
            mean,
            scale: 1.0,
            offset: Vec::new(),
        };
        SyntheticSpec {
            d,
            n_benign: 1000,
            benign_mean: vec![0.0; d],
            benign_scale: 1.0,
            classes: vec![
                class("alpha", corner([1.0, 1.0])),
                class("beta", corner([1.0, -1.0])),
                class("gamma", corner([-1.0, 1.0])),
            ],
            seed,
            extra_columns: true,
        }
    }

    /// Four attack classes that look alike on the first five dimensions
    /// (centre +6), except `delta`, which carries `shift` on those
    /// dimensions. With a large negative shift `delta` sits on the far side
    /// of the benign blob, so a detector trained on the others misses it.
    pub fn zero_day_demo(seed: u64, shift: f64) -> Self {
        let d = 10;
        let mean = |tail: f64| -> Vec<f64> { (0..d).map(|j| if j < 5 { 6.0 } else { tail }).collect() };
        let class = |name: &str, tail: f64, count: usize| SyntheticClass {
            name: name.into(),
            count,
            mean: mean(tail),
            scale: 1.0,
            offset: Vec::new(),
        };
        let mut delta = class("delta", 0.5, 175);
        delta.offset = (0..d).map(|j| if j < 5 { shift } else { 0.0 }).collect();
        SyntheticSpec {
            d,
            n_benign: 1000,
            benign_mean: vec![0.0; d],
            benign_scale: 1.0,
            classes: vec![
                class("alpha", 0.5, 200),
                class("beta", 0.25, 175),
                class("gamma", 0.75, 150),
                delta,
            ],
            seed,
            extra_columns: true,
        }
    }
}

/// MLP settings sized for the synthetic presets. The library defaults
/// assume datasets large enough for thousands of mini-batches per epoch;
/// with 1-2k rows the network needs smaller batches and a larger step to
/// converge within the default 30 epochs.
pub fn desk_mlp_config() -> MlpConfig {
    MlpConfig {
        batch_size: 32,
        learning_rate: 0.05,
        ..MlpConfig::default()
    }
}

/// Benign rows first, then each class in `classes` order. Each class draws
/// from its own random stream, so adding a class leaves the others intact.
pub fn synthesize_dataset(spec: &SyntheticSpec) -> Result<FlowTable> {
    spec.validate()?;
    let key = rng::derive_seed(spec.seed, SYNTH_SALT);
    let n = spec.n_rows();
    let mut features: Vec<Vec<f64>> = vec![Vec::with_capacity(n); spec.d];
    let mut proto = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut classes = Vec::with_capacity(n);

    let groups = std::iter::once((SYNTH_BENIGN, spec.n_benign, spec.benign_mean.clone(), spec.benign_scale, 0u8))
        .chain(spec.classes.iter().map(|c| (c.name.as_str(), c.count, c.centre(), c.scale, 1u8)));
    for (stream, (name, count, centre, scale, label)) in groups.enumerate() {
        let mut r = rng::stream(key, stream as u64);
        let unit = Normal::new(0.0, 1.0).expect("unit normal");
        for _ in 0..count {
            for (j, col) in features.iter_mut().enumerate() {
                col.push(centre[j] + scale * unit.sample(&mut r));
            }
            proto.push(if r.random_bool(0.5) { "tcp" } else { "udp" }.to_string());
            labels.push(label);
            classes.push(name.to_string());
        }
    }

    let mut columns = Vec::new();
    if spec.extra_columns {
        columns.push(Column::Text((0..n).map(|i| format!("flow-{i:06}")).collect()));
    }
    columns.extend(features.into_iter().map(Column::Numeric));
    if spec.extra_columns {
        columns.push(Column::Text(proto));
    }
    columns.push(Column::Label(labels));
    columns.push(Column::Text(classes));
    FlowTable::new(spec.schema(), columns, SYNTH_BENIGN)
}
