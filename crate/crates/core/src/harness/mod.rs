//! Experiment plumbing: configuration, datasets, EMC, CSV output, dispatch.

pub mod config;
pub mod data;
pub mod emc;
pub mod idx;
pub mod output;
pub mod runner;

pub use config::{Experiment, ExperimentConfig};
pub use data::{make_synthetic_regression, LabeledDataset, Labels, SyntheticKind, DATA_DIR_ENV};
pub use emc::estimate_emc;
pub use idx::{load_idx, parse_idx, write_idx, IdxTensor};
pub use output::{format_f64, CsvTable};
pub use runner::{run, run_experiment, RunOutput};
