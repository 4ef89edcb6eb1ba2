//! Synthetic time series generation through quantile graphs.
//!
//! A series is mapped to a quantile graph (equal-mass value bins plus a
//! first-order Markov transition matrix between them) and new series are
//! drawn by walking that chain and sampling uniformly inside each visited
//! bin. The remaining modules measure how faithful and how useful the
//! synthetic data is: statistical features, visibility/quantile graph
//! topology, PCA and repeated K-means with external validation indices.

pub mod error;
pub mod eval;
pub mod io;
pub mod netf;
pub mod qg;
pub mod rng;
pub mod series;
pub mod simulate;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use qg::QuantileGraph;
pub use series::TimeSeries;
