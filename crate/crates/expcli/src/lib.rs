//! Experiment runner for `skewlab`.
//!
//! An [`ExperimentConfig`] describes the base map, the cocycle and the
//! blocks to scan. Each experiment in [`experiments`] has a pure function
//! returning rows and a `run_*` wrapper writing CSV, SVG and
//! `resolved_config.toml` into an output directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod svg;

pub use config::ExperimentConfig;

/// Failure of a run, mapped to the process exit code by [`RunError::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] skewlab::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for config errors, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(skewlab::Error::InvalidArgument(_) | skewlab::Error::InvalidMap(_)) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}
