//! Network topology features of a series.
//!
//! A series is mapped to three graphs, its weighted natural visibility graph,
//! its weighted horizontal visibility graph and its quantile graph, and five
//! features are read off each one.

pub mod community;
pub mod graph;
pub mod visibility;

pub use graph::{graph_features, graph_features_with, Edge, GraphFeatureConfig, GraphFeatures, WeightedGraph};
pub use visibility::{hvg, nvg};

use crate::error::{Error, Result};
use crate::qg::{map_qg, QuantileGraph};
use crate::series::{sample_variance, TimeSeries};
use crate::stats::FeatureVector;

pub const GRAPH_NAMES: [&str; 3] = ["wnvg", "whvg", "qg"];
pub const GRAPH_FEATURE_NAMES: [&str; 5] = [
    "avg_degree",
    "avg_path_length",
    "clustering",
    "communities",
    "modularity",
];

pub fn netf_feature_names() -> Vec<String> {
    GRAPH_NAMES
        .iter()
        .flat_map(|g| GRAPH_FEATURE_NAMES.iter().map(move |f| format!("{g}_{f}")))
        .collect()
}

/// Directed graph over the occupied bins of a quantile graph, weighted by
/// transition probability. Bins that are never visited (possible with tied
/// values) are dropped and the rest renumbered in bin order.
pub fn quantile_graph_network(g: &QuantileGraph) -> WeightedGraph {
    let q = g.q();
    let counts = g.counts();
    let occupied: Vec<usize> = (0..q)
        .filter(|&i| (0..q).any(|j| counts[i][j] > 0 || counts[j][i] > 0))
        .collect();
    let mut index = vec![usize::MAX; q];
    for (new, &old) in occupied.iter().enumerate() {
        index[old] = new;
    }
    let w = g.transition_matrix();
    let edges = occupied
        .iter()
        .flat_map(|&i| {
            occupied
                .iter()
                .filter(move |&&j| w[i][j] > 0.0)
                .map(move |&j| Edge {
                    u: i,
                    v: j,
                    weight: w[i][j],
                })
        })
        .map(|e| Edge {
            u: index[e.u],
            v: index[e.v],
            weight: e.weight,
        })
        .collect();
    WeightedGraph::new(occupied.len(), edges, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetfConfig {
    pub quantiles: usize,
    pub graph: GraphFeatureConfig,
}

impl NetfConfig {
    pub fn new(quantiles: usize) -> Self {
        Self {
            quantiles,
            graph: GraphFeatureConfig::default(),
        }
    }
}

fn push_features(out: &mut Vec<f64>, f: &GraphFeatures) {
    out.extend([
        f.avg_degree,
        f.avg_path_length,
        f.clustering,
        f.communities as f64,
        f.modularity,
    ]);
}

/// The fifteen topology features `[wnvg | whvg | qg]`.
pub fn netf_vector(series: &TimeSeries, q: usize) -> Result<FeatureVector> {
    netf_vector_with(series, &NetfConfig::new(q))
}

pub fn netf_vector_with(series: &TimeSeries, cfg: &NetfConfig) -> Result<FeatureVector> {
    let y = series.complete_values()?;
    if y.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: y.len() });
    }
    if sample_variance(y) <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    let graphs = [
        nvg(series)?,
        hvg(series)?,
        quantile_graph_network(&map_qg(series, cfg.quantiles)?),
    ];
    let mut values = Vec::with_capacity(15);
    for g in &graphs {
        push_features(&mut values, &graph_features_with(g, &cfg.graph)?);
    }
    FeatureVector::new(netf_feature_names(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{reference_model, simulate};

    #[test]
    fn names_and_determinism() {
        let s = simulate(&reference_model("AR1_0.5").unwrap(), 300, 2).unwrap();
        let a = netf_vector(&s, 10).unwrap();
        assert_eq!(a.len(), 15);
        assert_eq!(a.names()[0], "wnvg_avg_degree");
        assert_eq!(a.names()[14], "qg_modularity");
        assert_eq!(a, netf_vector(&s, 10).unwrap());
        for (name, v) in a.names().iter().zip(a.values()) {
            if name.ends_with("modularity") {
                assert!((-0.5..=1.0).contains(v));
            }
            if name.ends_with("communities") {
                assert!(*v >= 1.0);
            }
        }
    }

    #[test]
    fn constant_series_rejected() {
        let s = TimeSeries::new(vec![1.0; 50]).unwrap();
        assert!(matches!(netf_vector(&s, 5), Err(Error::ConstantSeries)));
    }

    #[test]
    fn tied_bins_are_dropped() {
        let s = TimeSeries::new(vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
        let g = map_qg(&s, 4).unwrap();
        let net = quantile_graph_network(&g);
        assert_eq!(net.node_count(), 2);
        assert!(net.is_directed());
    }

    #[test]
    fn quantile_graph_degree_separates_models() {
        let qg_degree = |label: &str| -> Vec<f64> {
            (0..20)
                .map(|i| {
                    let s = simulate(&reference_model(label).unwrap(), 2000, 40 + i).unwrap();
                    let g = map_qg(&s, 50).unwrap();
                    graph_features(&quantile_graph_network(&g)).unwrap().avg_degree
                })
                .collect()
        };
        let stats = |xs: &[f64]| (crate::series::mean(xs), sample_variance(xs).sqrt());
        let (mw, sw) = stats(&qg_degree("WN"));
        let (ma, sa) = stats(&qg_degree("AR1_0.9"));
        assert!((mw - ma).abs() > 2.0 * sw.max(sa), "{mw} ± {sw} vs {ma} ± {sa}");
    }
}
