//! The `qgsynth` command line: corpus simulation, synthesis, feature
//! extraction, clustering, imputation, aggregation and plots, each run
//! recorded in a hashed manifest.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;
pub mod manifest;
pub mod plot;
pub mod svg;

pub use commands::run;
pub use error::{CliError, CliResult};
