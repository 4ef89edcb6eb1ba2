//! Weighted graphs and their five summary features.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netf::community;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Nodes `0..n` and weighted edges; undirected edges are stored once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    directed: bool,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>, directed: bool) -> Self {
        debug_assert!(edges.iter().all(|e| e.u < n && e.v < n));
        debug_assert!(edges.iter().all(|e| e.weight.is_finite() && e.weight > 0.0));
        Self { n, edges, directed }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Endpoint pairs, `(min, max)` for undirected graphs.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges
            .iter()
            .map(|e| {
                if self.directed {
                    (e.u, e.v)
                } else {
                    (e.u.min(e.v), e.u.max(e.v))
                }
            })
            .collect()
    }

    /// Unweighted degree on the undirected skeleton, self-loops ignored.
    pub fn degrees(&self) -> Vec<usize> {
        self.skeleton_neighbours().iter().map(|s| s.len()).collect()
    }

    /// Undirected weights with reciprocal directed arcs averaged, so a
    /// row-stochastic graph keeps weights on the same scale. Self-loops are
    /// returned separately.
    fn symmetric_weights(&self) -> (Vec<Vec<(usize, f64)>>, Vec<f64>) {
        let mut pair = std::collections::BTreeMap::<(usize, usize), f64>::new();
        let mut loops = vec![0.0; self.n];
        let scale = if self.directed { 0.5 } else { 1.0 };
        for e in &self.edges {
            if e.u == e.v {
                loops[e.u] += e.weight;
            } else {
                *pair.entry((e.u.min(e.v), e.u.max(e.v))).or_insert(0.0) += scale * e.weight;
            }
        }
        let mut adj = vec![Vec::new(); self.n];
        for ((a, b), w) in pair {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        (adj, loops)
    }

    fn skeleton_neighbours(&self) -> Vec<BTreeSet<usize>> {
        let mut nb = vec![BTreeSet::new(); self.n];
        for e in &self.edges {
            if e.u != e.v {
                nb[e.u].insert(e.v);
                nb[e.v].insert(e.u);
            }
        }
        nb
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphFeatures {
    /// Mean strength (undirected) or mean out-degree (directed).
    pub avg_degree: f64,
    /// Mean shortest-path length over connected pairs, distance `1 / weight`.
    pub avg_path_length: f64,
    /// Mean local clustering coefficient of the unweighted skeleton.
    pub clustering: f64,
    pub communities: usize,
    pub modularity: f64,
    /// Ordered node pairs with no connecting path.
    pub disconnected_pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphFeatureConfig {
    pub community_seed: u64,
    /// Restricts path lengths to this many evenly spaced sources.
    pub max_path_sources: Option<usize>,
}

impl Default for GraphFeatureConfig {
    fn default() -> Self {
        Self {
            community_seed: 0,
            max_path_sources: None,
        }
    }
}

pub fn graph_features(g: &WeightedGraph) -> Result<GraphFeatures> {
    graph_features_with(g, &GraphFeatureConfig::default())
}

/// k̄, d̄, C, S and modularity of a graph.
///
/// For directed graphs k̄ is the mean number of distinct successors: the
/// out-strength of a row-stochastic graph is identically one and carries no
/// information. Every other feature uses the undirected skeleton, with
/// reciprocal arc weights averaged.
pub fn graph_features_with(g: &WeightedGraph, cfg: &GraphFeatureConfig) -> Result<GraphFeatures> {
    if g.n == 0 {
        return Err(Error::EmptyGraph);
    }
    let n = g.n;
    let (adj, loops) = g.symmetric_weights();

    let avg_degree = if g.directed {
        let distinct: BTreeSet<(usize, usize)> = g.edges.iter().map(|e| (e.u, e.v)).collect();
        distinct.len() as f64 / n as f64
    } else {
        2.0 * g.edges.iter().map(|e| e.weight).sum::<f64>() / n as f64
    };

    let (avg_path_length, disconnected_pairs) = path_lengths(&adj, cfg.max_path_sources);
    let clustering = mean_local_clustering(&g.skeleton_neighbours());

    let partition = community::louvain(&adj, &loops, cfg.community_seed);
    let modularity = community::modularity(&adj, &loops, &partition);
    let communities = partition.iter().collect::<BTreeSet<_>>().len();

    Ok(GraphFeatures {
        avg_degree,
        avg_path_length,
        clustering,
        communities,
        modularity,
        disconnected_pairs,
    })
}

#[derive(Copy, Clone, PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sum of distances to reachable nodes and the count of unreachable ones.
fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> (f64, usize, usize) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Frontier { dist: 0.0, node: source });
    while let Some(Frontier { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, w) in &adj[node] {
            let nd = d + 1.0 / w;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Frontier { dist: nd, node: next });
            }
        }
    }
    let mut total = 0.0;
    let mut reached = 0;
    for (i, &d) in dist.iter().enumerate() {
        if i != source && d.is_finite() {
            total += d;
            reached += 1;
        }
    }
    (total, reached, n - 1 - reached)
}

fn path_lengths(adj: &[Vec<(usize, f64)>], max_sources: Option<usize>) -> (f64, usize) {
    let n = adj.len();
    let sources: Vec<usize> = match max_sources {
        Some(k) if k > 0 && k < n => (0..k).map(|i| i * n / k).collect(),
        _ => (0..n).collect(),
    };
    let per_source: Vec<(f64, usize, usize)> = sources.par_iter().map(|&s| dijkstra(adj, s)).collect();
    let (total, reached, missing) = per_source
        .into_iter()
        .fold((0.0, 0usize, 0usize), |acc, x| (acc.0 + x.0, acc.1 + x.1, acc.2 + x.2));
    let mean = if reached == 0 { 0.0 } else { total / reached as f64 };
    (mean, missing)
}

/// Nodes of degree below two contribute zero.
fn mean_local_clustering(nb: &[BTreeSet<usize>]) -> f64 {
    let n = nb.len();
    let total: f64 = (0..n)
        .map(|i| {
            let k = nb[i].len();
            if k < 2 {
                return 0.0;
            }
            let neigh: Vec<usize> = nb[i].iter().copied().collect();
            let mut links = 0usize;
            for (x, &a) in neigh.iter().enumerate() {
                for &b in &neigh[x + 1..] {
                    if nb[a].contains(&b) {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .sum();
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
        WeightedGraph::new(
            n,
            edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }).collect(),
            false,
        )
    }

    #[test]
    fn triangle() {
        let f = graph_features(&undirected(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])).unwrap();
        assert_eq!(f.avg_degree, 2.0);
        assert_eq!(f.clustering, 1.0);
        assert_eq!(f.avg_path_length, 1.0);
        assert_eq!(f.communities, 1);
        assert!(f.modularity.abs() < 1e-12);
    }

    #[test]
    fn path_of_three() {
        let f = graph_features(&undirected(3, &[(0, 1, 1.0), (1, 2, 1.0)])).unwrap();
        assert_eq!(f.clustering, 0.0);
        assert!((f.avg_path_length - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.disconnected_pairs, 0);
    }

    #[test]
    fn two_triangles_split() {
        let g = undirected(
            6,
            &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 0.1)],
        );
        let f = graph_features(&g).unwrap();
        assert_eq!(f.communities, 2);
        assert!(f.modularity > 0.3, "{}", f.modularity);
    }

    #[test]
    fn disconnected_pairs_are_excluded() {
        let f = graph_features(&undirected(4, &[(0, 1, 0.5), (2, 3, 1.0)])).unwrap();
        assert_eq!(f.disconnected_pairs, 8);
        assert!((f.avg_path_length - 1.5).abs() < 1e-12);
    }

    #[test]
    fn directed_degree_counts_successors() {
        let g = WeightedGraph::new(
            2,
            vec![
                Edge { u: 0, v: 0, weight: 0.5 },
                Edge { u: 0, v: 1, weight: 0.5 },
                Edge { u: 1, v: 0, weight: 1.0 },
            ],
            true,
        );
        let f = graph_features(&g).unwrap();
        assert_eq!(f.avg_degree, 1.5);
        // symmetrised weight (0.5 + 1.0) / 2
        assert!((f.avg_path_length - 1.0 / 0.75).abs() < 1e-12);
        assert!(matches!(graph_features(&WeightedGraph::new(0, vec![], false)), Err(Error::EmptyGraph)));
    }

    #[test]
    fn sampled_sources_match_when_covering() {
        let g = undirected(5, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 0.5)]);
        let full = graph_features(&g).unwrap();
        let cfg = GraphFeatureConfig { max_path_sources: Some(5), ..Default::default() };
        assert_eq!(graph_features_with(&g, &cfg).unwrap(), full);
    }
}
