//! Reproducible experiments: config in, tables and a manifest out.
//!
//! All randomness derives from the config's seed. Each experiment phase has
//! its own sub-seed label and each replica its own stream, so outputs are
//! byte-identical across runs and worker counts.

pub mod config;
pub mod coupling;
pub mod er;
pub mod manifest;
pub mod moments;
pub mod output;
mod run;
pub mod scaling;

pub use config::{ExperimentConfig, ExperimentSpec, GraphSpec, ModelSection, OutputFormat};
pub use coupling::{coupling_decay_experiment, CouplingParams, CouplingResult};
pub use er::{er_concentration_experiment, ErResult};
pub use manifest::{OutputRecord, RunManifest};
pub use moments::{matching_moment_experiment, MomentsResult};
pub use output::{emit_report, Table};
pub use run::{graph_from_family, run_experiment};
pub use scaling::{barrier_scaling_experiment, ScalingRow, ScalingSummary};
