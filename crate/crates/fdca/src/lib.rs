//! File formats, parallel scans, baselines and the `fdca` command line on
//! top of [`fdca_core`].

pub mod baseline;
pub mod catalog_io;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod report;
pub mod scan;

pub use error::{AppError, ExitStatus};
