use std::io;
use std::path::PathBuf;

use fdca_core::catalog::CatalogError;
use fdca_core::cluster::ClusterError;
use fdca_core::cycles::CycleError;
use fdca_core::godel::GodelError;
use thiserror::Error;

use crate::dataset::DataError;

/// Process exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Failure = 1,
    Precondition = 2,
    Budget = 3,
}

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Budget(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Godel(#[from] GodelError),
}

fn cycle_is_budget(e: &CycleError) -> bool {
    matches!(e, CycleError::Budget { .. } | CycleError::OrbitCap { .. })
}

fn godel_is_budget(e: &GodelError) -> bool {
    matches!(e, GodelError::TooLarge { .. })
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn status(&self) -> ExitStatus {
        let budget = match self {
            AppError::Budget(_) => true,
            AppError::Cycle(e) => cycle_is_budget(e),
            AppError::Godel(e) => godel_is_budget(e),
            AppError::Data(DataError::Godel(e)) => godel_is_budget(e),
            AppError::Catalog(CatalogError::FullFamilyRefused { .. }) => true,
            AppError::Catalog(CatalogError::Cycle(e)) => cycle_is_budget(e),
            AppError::Cluster(ClusterError::Cycle(e)) => cycle_is_budget(e),
            AppError::Cluster(ClusterError::Godel(e)) => godel_is_budget(e),
            _ => false,
        };
        if budget {
            ExitStatus::Budget
        } else {
            ExitStatus::Precondition
        }
    }
}
