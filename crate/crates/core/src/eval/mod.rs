//! Utility evaluation: standardisation, PCA, repeated K-means and
//! cluster validation.

pub mod kmeans;
pub mod matrix;
pub mod metrics;
pub mod pca;
pub mod report;

pub use kmeans::{kmeans, kmeans_rows, Clustering, KMeansResult};
pub use matrix::{standardize, FeatureMatrix, Origin, RowLabel};
pub use metrics::{ari, nmi, silhouette};
pub use pca::{pca, Pca};
pub use report::{cluster_report, select_k, ClusterConfig, ClusterReport, KScore};
