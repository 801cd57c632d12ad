//! File formats, command-line interface and HTTP service for `swh-core`.

pub mod candidate_io;
pub mod cli;
pub mod config;
pub mod dataset_io;
pub mod error;
pub mod model_io;
pub mod parallel;
pub mod report_io;
pub mod serve;

pub use error::{Error, Result};
