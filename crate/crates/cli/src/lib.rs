//! Experiment runner for the TWDM-PON scheduling simulator: config files,
//! preset figure sweeps and CSV / series output.

pub mod config_file;
pub mod params;
pub mod plan;
pub mod runner;

use std::path::PathBuf;

use thiserror::Error;

pub use config_file::{ConfigError, ExperimentFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} run(s) failed")]
    Runs(usize),
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments_chapter {}
