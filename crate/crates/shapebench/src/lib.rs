//! Experiment harness for `shapebench-core`: JSON configuration, the
//! external-simulator adapter, the repetition protocol with its result bundle,
//! and the `shapebench` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod external;
pub mod output;

pub use config::{load_config, load_config_file, ExperimentConfig};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentOutcome};
pub use external::{ExternalObjective, ExternalObjectiveConfig};
