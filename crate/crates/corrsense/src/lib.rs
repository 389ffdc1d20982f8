//! Experiment driver for `corrsense-core`: flat JSON configs, JSON/CSV
//! artifacts and the `corrsense` command line.

pub mod config;
pub mod error;
pub mod experiments;
pub mod formats;

pub use config::{Experiment, ExperimentConfig};
pub use error::AppError;
pub use experiments::{run_experiment, Scenario, Summary};
