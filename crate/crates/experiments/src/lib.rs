//! Config-driven experiments on discrete simplicial averages, their reports,
//! and the `simplicial` command-line tool.

pub mod cache;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use cache::CopyCache;
pub use config::ExperimentConfig;
pub use error::ExperimentError;
pub use experiments::{Context, Experiment, ExperimentRegistry};
pub use report::Report;
