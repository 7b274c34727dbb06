//! Experiment orchestration: config, synthetic data, the scenario matrix
//! and report files.

pub mod config;
pub mod report;
pub mod run;
pub mod synth;

pub use config::{DatasetConfig, ExperimentConfig, WdConfig, WdInput};
pub use report::emit_reports;
pub use run::{run_experiment, run_on_table, RunReport};
pub use synth::{desk_mlp_config, synthesize_dataset, SyntheticClass, SyntheticSpec};
