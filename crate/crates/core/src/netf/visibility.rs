//! Natural and horizontal visibility graphs with distance-based weights.

use crate::error::{Error, Result};
use crate::netf::graph::{Edge, WeightedGraph};
use crate::series::TimeSeries;

/// Edge weight between time points `a < b`: inverse Euclidean distance in
/// the (t, y) plane.
pub fn visibility_weight(a: usize, b: usize, ya: f64, yb: f64) -> f64 {
    1.0 / ((b - a) as f64).hypot(yb - ya)
}

fn edge(a: usize, b: usize, y: &[f64]) -> Edge {
    Edge {
        u: a,
        v: b,
        weight: visibility_weight(a, b, y[a], y[b]),
    }
}

fn values(series: &TimeSeries) -> Result<&[f64]> {
    let y = series.complete_values()?;
    if y.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: y.len() });
    }
    Ok(y)
}

/// `c` lies strictly below the segment from `m` to `a` (seen from `m`):
/// `(y_c - y_m)(m - a) < (y_a - y_m)(m - c)` with `c` between `a` and `m`.
fn below(y: &[f64], m: usize, a: usize, c: usize) -> bool {
    let dist = |i: usize| (i as f64 - m as f64).abs();
    (y[c] - y[m]) * dist(a) < (y[a] - y[m]) * dist(c)
}

/// Natural visibility graph, built by divide and conquer: the maximum of an
/// interval blocks every line of sight across it, so it is linked to the
/// points it sees on each side and the two halves are solved separately.
pub fn nvg(series: &TimeSeries) -> Result<WeightedGraph> {
    let y = values(series)?;
    let n = y.len();
    let mut edges = Vec::new();
    let mut stack = vec![(0usize, n - 1)];
    while let Some((lo, hi)) = stack.pop() {
        if lo >= hi {
            continue;
        }
        let m = (lo..=hi).fold(lo, |best, i| if y[i] > y[best] { i } else { best });

        // leftwards: a is visible iff it rises above every earlier sight line
        if m > lo {
            let mut pivot = m - 1;
            edges.push(edge(m - 1, m, y));
            for a in (lo..m - 1).rev() {
                if below(y, m, a, pivot) {
                    edges.push(edge(a, m, y));
                    pivot = a;
                }
            }
            stack.push((lo, m - 1));
        }
        if m < hi {
            let mut pivot = m + 1;
            edges.push(edge(m, m + 1, y));
            for b in m + 2..=hi {
                if below(y, m, b, pivot) {
                    edges.push(edge(m, b, y));
                    pivot = b;
                }
            }
            stack.push((m + 1, hi));
        }
    }
    edges.sort_by_key(|e| (e.u, e.v));
    Ok(WeightedGraph::new(n, edges, false))
}

/// Horizontal visibility graph: `(a, b)` linked iff every point between them
/// is strictly lower than both. Linear-time stack construction.
pub fn hvg(series: &TimeSeries) -> Result<WeightedGraph> {
    let y = values(series)?;
    let n = y.len();
    let mut edges = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for b in 0..n {
        while let Some(&a) = stack.last() {
            edges.push(edge(a, b, y));
            if y[a] < y[b] {
                stack.pop();
            } else {
                if y[a] == y[b] {
                    stack.pop();
                }
                break;
            }
        }
        stack.push(b);
    }
    edges.sort_by_key(|e| (e.u, e.v));
    Ok(WeightedGraph::new(n, edges, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn brute_nvg(y: &[f64]) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for a in 0..y.len() {
            for b in a + 1..y.len() {
                let (ta, tb) = (a as f64, b as f64);
                if (a + 1..b).all(|c| y[c] < y[b] + (y[a] - y[b]) * (tb - c as f64) / (tb - ta)) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    fn brute_hvg(y: &[f64]) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for a in 0..y.len() {
            for b in a + 1..y.len() {
                if (a + 1..b).all(|c| y[c] < y[a].min(y[b])) {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn convex_series_is_complete() {
        let y: Vec<f64> = (0..16).map(|t| (t * t) as f64).collect();
        let g = nvg(&ts(&y)).unwrap();
        assert_eq!(g.edges().len(), 16 * 15 / 2);
        assert_eq!(g.edge_set(), brute_nvg(&y));
    }

    #[test]
    fn linear_series_is_a_path() {
        let y: Vec<f64> = (0..30).map(|t| 2.0 * t as f64 + 1.0).collect();
        let g = nvg(&ts(&y)).unwrap();
        let path: BTreeSet<_> = (0..29).map(|i| (i, i + 1)).collect();
        assert_eq!(g.edge_set(), path);
    }

    #[test]
    fn two_points() {
        let g = nvg(&ts(&[1.0, -1.0])).unwrap();
        assert_eq!(g.edges().len(), 1);
        let w = g.edges()[0].weight;
        assert!((w - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!(nvg(&ts(&[1.0])).is_err());
        assert!(hvg(&ts(&[1.0])).is_err());
    }

    #[test]
    fn hvg_examples() {
        let y: Vec<f64> = (0..10).map(|t| t as f64 * 0.5).collect();
        let g = hvg(&ts(&y)).unwrap();
        assert_eq!(g.edges().len(), 9);
        let deg = g.degrees();
        let avg = deg.iter().sum::<usize>() as f64 / 10.0;
        assert!((avg - 2.0 * 9.0 / 10.0).abs() < 1e-12);

        let g = hvg(&ts(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(g.edge_set(), [(0, 1), (0, 2), (1, 2)].into_iter().collect());
        assert_eq!(g.degrees(), vec![2, 2, 2]);
    }

    #[test]
    fn hvg_ties_block() {
        let y = [2.0, 1.0, 2.0, 1.0, 2.0];
        assert_eq!(hvg(&ts(&y)).unwrap().edge_set(), brute_hvg(&y));
    }

    proptest! {
        #[test]
        fn matches_brute_force(y in prop::collection::vec(-50.0f64..50.0, 2..120)) {
            let s = ts(&y);
            let n = nvg(&s).unwrap();
            let h = hvg(&s).unwrap();
            prop_assert_eq!(n.edge_set(), brute_nvg(&y));
            prop_assert_eq!(h.edge_set(), brute_hvg(&y));
            prop_assert!(h.edge_set().is_subset(&n.edge_set()));
        }

        #[test]
        fn tied_integer_series(y in prop::collection::vec(0i32..4, 2..80)) {
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            let s = ts(&y);
            prop_assert_eq!(nvg(&s).unwrap().edge_set(), brute_nvg(&y));
            prop_assert_eq!(hvg(&s).unwrap().edge_set(), brute_hvg(&y));
        }

        #[test]
        fn shift_invariant(y in prop::collection::vec(-50.0f64..50.0, 2..80), c in prop::sample::select(vec![-64.0, 0.5, 1024.0])) {
            let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
            let (a, b) = (nvg(&ts(&y)).unwrap(), nvg(&ts(&shifted)).unwrap());
            prop_assert_eq!(a.edge_set(), b.edge_set());
            for (ea, eb) in a.edges().iter().zip(b.edges()) {
                prop_assert!((ea.weight - eb.weight).abs() <= 1e-12 * ea.weight);
            }
        }
    }
}
