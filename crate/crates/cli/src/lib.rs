//! Deterministic front end for btps experiments: configs, presets and artifact output.

pub mod config;
pub mod error;
pub mod output;
pub mod preset;
pub mod run;

pub use config::{resolve, Args, Command, ExperimentConfig, SymbolSource};
pub use error::CliError;
pub use run::{run, Summary};
