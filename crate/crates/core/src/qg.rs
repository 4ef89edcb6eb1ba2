//! Forward quantile-graph mapping.
//!
//! The support of a series is cut into `q` equal-mass bins at its sample
//! quantiles; node `k` (0-based) is the bin `(b_k, b_{k+1}]`, with the first
//! bin also holding `b_0`. Edge weights count consecutive transitions between
//! bins, and `w` is the row-normalised count matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Quantile boundaries plus first-order transition statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuantileGraph", into = "RawQuantileGraph")]
pub struct QuantileGraph {
    q: usize,
    boundaries: Vec<f64>,
    counts: Vec<Vec<u64>>,
    w: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawQuantileGraph {
    q: usize,
    boundaries: Vec<f64>,
    counts: Vec<Vec<u64>>,
    w: Vec<Vec<f64>>,
}

impl From<QuantileGraph> for RawQuantileGraph {
    fn from(g: QuantileGraph) -> Self {
        Self {
            q: g.q,
            boundaries: g.boundaries,
            counts: g.counts,
            w: g.w,
        }
    }
}

impl TryFrom<RawQuantileGraph> for QuantileGraph {
    type Error = Error;

    fn try_from(raw: RawQuantileGraph) -> Result<Self> {
        let g = QuantileGraph {
            q: raw.q,
            boundaries: raw.boundaries,
            counts: raw.counts,
            w: raw.w,
        };
        g.validate()?;
        Ok(g)
    }
}

const ROW_SUM_TOLERANCE: f64 = 1e-12;

impl QuantileGraph {
    /// Builds a graph from boundaries and a count matrix, normalising rows.
    pub fn from_counts(boundaries: Vec<f64>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let q = counts.len();
        let w = normalize_rows(&counts);
        let g = Self {
            q,
            boundaries,
            counts,
            w,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGraph(msg));
        if self.q == 0 {
            return bad("q must be positive".into());
        }
        if self.boundaries.len() != self.q + 1 {
            return bad(format!(
                "expected {} boundaries, found {}",
                self.q + 1,
                self.boundaries.len()
            ));
        }
        if self.boundaries.iter().any(|b| !b.is_finite()) {
            return bad("non-finite boundary".into());
        }
        if self.boundaries.windows(2).any(|p| p[0] > p[1]) {
            return bad("boundaries must be nondecreasing".into());
        }
        if self.counts.len() != self.q || self.counts.iter().any(|r| r.len() != self.q) {
            return bad("counts must be q x q".into());
        }
        if self.w.len() != self.q || self.w.iter().any(|r| r.len() != self.q) {
            return bad("w must be q x q".into());
        }
        for (i, row) in self.w.iter().enumerate() {
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return bad(format!("row {i} has an entry outside [0, 1]"));
            }
            let s: f64 = row.iter().sum();
            if s != 0.0 && (s - 1.0).abs() > ROW_SUM_TOLERANCE {
                return bad(format!("row {i} sums to {s}"));
            }
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// Row-stochastic transition matrix; rows never left are all zeros.
    pub fn transition_matrix(&self) -> &[Vec<f64>] {
        &self.w
    }

    /// Value range `(lo, hi]` of bin `k`.
    pub fn bin_range(&self, k: usize) -> (f64, f64) {
        (self.boundaries[k], self.boundaries[k + 1])
    }

    pub fn row_is_live(&self, k: usize) -> bool {
        self.w[k].iter().any(|&p| p > 0.0)
    }

    /// Bins with at least one outgoing transition.
    pub fn live_rows(&self) -> Vec<usize> {
        (0..self.q).filter(|&k| self.row_is_live(k)).collect()
    }

    pub fn bin_of(&self, value: f64) -> Result<usize> {
        assign_quantile(value, &self.boundaries)
    }

    pub fn total_transitions(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

fn normalize_rows(counts: &[Vec<u64>]) -> Vec<Vec<f64>> {
    counts
        .iter()
        .map(|row| {
            let total: u64 = row.iter().sum();
            if total == 0 {
                vec![0.0; row.len()]
            } else {
                row.iter().map(|&c| c as f64 / total as f64).collect()
            }
        })
        .collect()
}

/// `q + 1` boundaries: the minimum, the sample quantiles at `i / q`
/// (linear interpolation between order statistics, `h = (n - 1) p`), and the
/// maximum.
pub fn quantile_bins(values: &[f64], q: usize) -> Result<Vec<f64>> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut bounds = Vec::with_capacity(q + 1);
    bounds.push(sorted[0]);
    for i in 1..q {
        let h = (n - 1) as f64 * i as f64 / q as f64;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        let b = if lo + 1 < n {
            sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
        } else {
            sorted[lo]
        };
        bounds.push(b);
    }
    bounds.push(sorted[n - 1]);
    Ok(bounds)
}

/// 0-based bin of `value`: the smallest `k` with `value <= b_{k+1}`.
pub fn assign_quantile(value: f64, boundaries: &[f64]) -> Result<usize> {
    let (first, last) = match (boundaries.first(), boundaries.last()) {
        (Some(&f), Some(&l)) if boundaries.len() >= 2 => (f, l),
        _ => return Err(Error::InvalidArgument("need at least two boundaries".into())),
    };
    if !(first..=last).contains(&value) {
        return Err(Error::OutOfSupport(value));
    }
    Ok(boundaries[1..].partition_point(|&b| b < value))
}

/// Transition counts of consecutive pairs `(from, to)` drawn from bins of
/// `boundaries`.
fn count_pairs<I>(boundaries: &[f64], pairs: I) -> Result<Vec<Vec<u64>>>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let q = boundaries.len() - 1;
    let mut counts = vec![vec![0u64; q]; q];
    for (a, b) in pairs {
        let i = assign_quantile(a, boundaries)?;
        let j = assign_quantile(b, boundaries)?;
        counts[i][j] += 1;
    }
    Ok(counts)
}

/// Quantile graph of a complete series.
pub fn map_qg(series: &TimeSeries, q: usize) -> Result<QuantileGraph> {
    let values = series.complete_values()?;
    if values.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: values.len(),
        });
    }
    let boundaries = quantile_bins(values, q)?;
    let counts = count_pairs(&boundaries, values.windows(2).map(|w| (w[0], w[1])))?;
    QuantileGraph::from_counts(boundaries, counts)
}

/// Quantile graph fitted on a series with gaps: quantiles from every observed
/// value, transitions only from pairs of consecutive observed points.
pub fn map_qg_observed(series: &TimeSeries, q: usize) -> Result<QuantileGraph> {
    let observed: Vec<f64> = series.observed().collect();
    if observed.is_empty() {
        return Err(Error::AllMissing);
    }
    let boundaries = quantile_bins(&observed, q)?;
    let pairs = (1..series.len()).filter_map(|t| Some((series.get(t - 1)?, series.get(t)?)));
    let counts = count_pairs(&boundaries, pairs)?;
    QuantileGraph::from_counts(boundaries, counts)
}

/// Transition matrix of `values` measured on a fixed partition.
///
/// Values outside the partition's support are clamped into the end bins.
/// Used to compare a synthetic series against the graph that produced it
/// without re-estimating quantiles.
pub fn transitions_on(boundaries: &[f64], values: &[f64]) -> Result<Vec<Vec<f64>>> {
    let lo = boundaries[0];
    let hi = boundaries[boundaries.len() - 1];
    let clamp = |v: f64| v.clamp(lo, hi);
    let counts = count_pairs(
        boundaries,
        values.windows(2).map(|w| (clamp(w[0]), clamp(w[1]))),
    )?;
    Ok(normalize_rows(&counts))
}

/// Largest absolute entrywise difference between two square matrices.
pub fn max_abs_difference(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(quantile_bins(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(), vec![1.0, 2.5, 4.0]);
        assert_eq!(quantile_bins(&[3.5; 3], 4).unwrap(), vec![3.5; 5]);
        assert_eq!(quantile_bins(&[4.0, -1.0, 9.0, 2.0], 1).unwrap(), vec![-1.0, 9.0]);
        assert!(matches!(quantile_bins(&[], 3), Err(Error::EmptyInput)));
        assert!(matches!(quantile_bins(&[1.0, f64::NAN], 3), Err(Error::NonFinite(1))));
    }

    #[test]
    fn assignment_examples() {
        let b = [1.0, 2.5, 4.0];
        assert_eq!(assign_quantile(1.0, &b).unwrap(), 0);
        assert_eq!(assign_quantile(2.5, &b).unwrap(), 0);
        assert_eq!(assign_quantile(2.6, &b).unwrap(), 1);
        assert_eq!(assign_quantile(4.0, &b).unwrap(), 1);
        assert!(matches!(assign_quantile(4.1, &b), Err(Error::OutOfSupport(_))));
        assert!(matches!(assign_quantile(0.0, &b), Err(Error::OutOfSupport(_))));
        // ties resolve to the lowest bin
        assert_eq!(assign_quantile(2.0, &[0.0, 2.0, 2.0, 2.0, 5.0]).unwrap(), 0);
        assert_eq!(assign_quantile(2.0, &[2.0, 2.0, 2.0, 5.0]).unwrap(), 0);
        assert_eq!(assign_quantile(3.0, &[2.0, 2.0, 2.0, 5.0]).unwrap(), 2);
    }

    #[test]
    fn map_examples() {
        let g = map_qg(&ts(&[1.0, 2.0, 3.0]), 2).unwrap();
        assert_eq!(g.counts(), &[vec![1, 1], vec![0, 0]]);
        assert_eq!(g.transition_matrix(), &[vec![0.5, 0.5], vec![0.0, 0.0]]);

        let g = map_qg(&ts(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0]), 2).unwrap();
        assert_eq!(g.transition_matrix(), &[vec![0.0, 1.0], vec![1.0, 0.0]]);

        let g = map_qg(&ts(&[7.0; 10]), 2).unwrap();
        assert_eq!(g.transition_matrix(), &[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(g.live_rows(), vec![0]);

        assert!(matches!(map_qg(&ts(&[1.0]), 2), Err(Error::TooShort { .. })));
    }

    #[test]
    fn observed_fit_skips_broken_pairs() {
        let s = TimeSeries::from_observations(vec![Some(0.0), Some(1.0), None, Some(0.0), Some(1.0)])
            .unwrap();
        let g = map_qg_observed(&s, 2).unwrap();
        assert_eq!(g.total_transitions(), 2);
        assert_eq!(g.counts(), &[vec![0, 2], vec![0, 0]]);
    }

    #[test]
    fn json_shape_and_validation() {
        let g = map_qg(&ts(&[0.0, 1.0, 0.0, 1.0]), 2).unwrap();
        let json = serde_json::to_value(&g).unwrap();
        assert_eq!(json["q"], 2);
        assert_eq!(json["boundaries"].as_array().unwrap().len(), 3);
        assert_eq!(json["counts"][0][1], 2);
        assert_eq!(json["w"][1][0], 1.0);
        let back: QuantileGraph = serde_json::from_value(json).unwrap();
        assert_eq!(back, g);

        let bad = serde_json::json!({"q": 2, "boundaries": [0.0, 1.0, 0.5], "counts": [[0,1],[1,0]], "w": [[0.0,1.0],[1.0,0.0]]});
        assert!(serde_json::from_value::<QuantileGraph>(bad).is_err());
        let bad = serde_json::json!({"q": 2, "boundaries": [0.0, 0.5, 1.0], "counts": [[0,1],[1,0]], "w": [[0.3,0.3],[1.0,0.0]]});
        assert!(serde_json::from_value::<QuantileGraph>(bad).is_err());
    }

    #[test]
    fn equal_mass_occupancy() {
        use rand::Rng;
        let mut rng = crate::rng::stream(11, 0);
        for &(t, q) in &[(1000usize, 10usize), (997, 7), (5000, 50)] {
            let v: Vec<f64> = (0..t).map(|_| rng.random::<f64>()).collect();
            let b = quantile_bins(&v, q).unwrap();
            let mut occ = vec![0usize; q];
            for &x in &v {
                occ[assign_quantile(x, &b).unwrap()] += 1;
            }
            for &o in &occ {
                assert!(o + 1 >= t / q && o <= t.div_ceil(q) + 1, "{occ:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn rows_are_stochastic(v in prop::collection::vec(-1e3f64..1e3, 2..1000), q in 1usize..30) {
            let g = map_qg(&ts(&v), q).unwrap();
            prop_assert_eq!(g.total_transitions(), (v.len() - 1) as u64);
            prop_assert_eq!(g.boundaries()[0], v.iter().cloned().fold(f64::INFINITY, f64::min));
            prop_assert_eq!(g.boundaries()[q], v.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            for (row, counts) in g.transition_matrix().iter().zip(g.counts()) {
                let s: f64 = row.iter().sum();
                if counts.iter().sum::<u64>() > 0 {
                    prop_assert!((s - 1.0).abs() <= 1e-12);
                } else {
                    prop_assert!(row.iter().all(|&p| p == 0.0));
                }
                prop_assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
            }
        }

        #[test]
        fn invariant_under_increasing_transforms(
            v in prop::collection::hash_set(-10_000i32..10_000, 2..300),
            q in 1usize..20,
        ) {
            // distinct values, so ranks are unambiguous
            let v: Vec<f64> = v.into_iter().map(|x| x as f64 / 100.0).collect();
            let f: Vec<f64> = v.iter().map(|x| x.powi(3) + 5.0 * x).collect();
            let g1 = map_qg(&ts(&v), q).unwrap();
            let g2 = map_qg(&ts(&f), q).unwrap();
            prop_assert_eq!(g1.transition_matrix(), g2.transition_matrix());
            prop_assert_eq!(g1.clone(), map_qg(&ts(&v), q).unwrap());
        }
    }
}
