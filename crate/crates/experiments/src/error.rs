use std::path::PathBuf;

use simplicial_core::averaging::AverageError;
use simplicial_core::geometry::GeometryError;
use simplicial_core::grid::GridError;
use simplicial_core::littlewood_paley::LpError;
use simplicial_core::martingale::MartingaleError;
use simplicial_core::variation::VariationError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Infeasible(String),
    /// A computation rejected the configured parameters.
    #[error("{0}")]
    Parameters(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Internal(String),
}

impl ExperimentError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefix used when the error is printed, `error[<kind>]: ...`.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Infeasible(_) => "infeasible",
            Self::Parameters(_) => "parameters",
            Self::Io { .. } => "io",
            Self::Internal(_) => "internal",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Infeasible(_) | Self::Parameters(_) => 2,
            Self::Io { .. } | Self::Internal(_) => 3,
        }
    }
}

macro_rules! parameter_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for ExperimentError {
            fn from(e: $t) -> Self {
                Self::Parameters(e.to_string())
            }
        })*
    };
}

parameter_errors!(
    AverageError,
    GeometryError,
    GridError,
    LpError,
    MartingaleError,
    VariationError
);

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;
