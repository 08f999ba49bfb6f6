use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The experiment description is malformed or violates an admissibility
    /// window.
    #[error("invalid spec: {0}")]
    Spec(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("report has no data points")]
    NoData,

    #[error("malformed report: {0}")]
    Report(String),

    #[error(transparent)]
    Core(#[from] lpvsc::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
