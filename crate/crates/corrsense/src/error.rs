use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigSyntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invalid file {path}: {message}")]
    InvalidFile { path: PathBuf, message: String },
    #[error("numerical degeneracy in cluster {cluster}: {source}")]
    Degenerate {
        cluster: usize,
        source: corrsense_core::Error,
    },
    #[error(transparent)]
    Core(#[from] corrsense_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn invalid_config(e: corrsense_core::Error) -> Self {
        AppError::InvalidConfig(e.to_string())
    }

    /// Tags a core error with the cluster it came from. Only degeneracy gets
    /// its own exit status; everything else passes through.
    pub fn in_cluster(cluster: usize) -> impl Fn(corrsense_core::Error) -> Self {
        move |e| match e {
            corrsense_core::Error::NumericalDegeneracy => {
                AppError::Degenerate { cluster, source: e }
            }
            other => AppError::Core(other),
        }
    }

    /// 2 for config problems, 3 for numerical degeneracy, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::ConfigSyntax { .. }
            | AppError::InvalidConfig(_)
            | AppError::InvalidFile { .. } => 2,
            AppError::Degenerate { .. } => 3,
            _ => 1,
        }
    }
}
