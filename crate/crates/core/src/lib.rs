//! Zero-day evaluation harness for ML-based network intrusion detection.
//!
//! The crate builds leave-one-attack-class-out scenarios from labelled flow
//! records, trains two from-scratch binary classifiers (a Gini random forest
//! and a two-hidden-layer ReLU perceptron), scores every scenario with the
//! usual detection metrics plus the zero-day detection rate, and explains
//! weak detection through per-feature first Wasserstein distances between a
//! scenario's training and test rows.
//!
//! Module map:
//!
//! * [`flowdata`]: CSV loading, schema, class catalog, summaries.
//! * [`preprocess`]: identifier dropping, label encoding, min-max scaling.
//! * [`zslsplit`]: stratified fold plans and the zero-day / known-attack scenarios.
//! * [`classifiers`]: random forest, MLP and thresholding.
//! * [`metrics`]: confusion counts, detection metrics, AUC, Z-DR, fold aggregation.
//! * [`wdanalysis`]: 1-D Wasserstein distance, per-feature reports, Spearman correlation.
//! * [`harness`]: experiment config, synthetic data, the run orchestrator and report files.

pub mod classifiers;
pub mod error;
pub mod flowdata;
pub mod harness;
pub mod metrics;
pub mod par;
pub mod preprocess;
pub mod rng;
pub mod wdanalysis;
pub mod zslsplit;

pub use error::{Error, Result};
pub use par::Exec;
