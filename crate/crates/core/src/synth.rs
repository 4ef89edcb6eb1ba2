//! Inverse quantile-graph synthesis and quantile-graph gap imputation.
//!
//! A synthetic series is a walk on the graph's Markov chain: the first bin
//! is drawn uniformly among live rows (rows with outgoing mass), every step
//! emits a value uniform on the current bin's range `(b_k, b_{k+1}]`, and the
//! next bin is drawn from row `k` of `W`. A walk that lands on a dead row
//! restarts uniformly among the live rows.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qg::{self, QuantileGraph};
use crate::rng::{self, StreamRng};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisRequest {
    pub graph: QuantileGraph,
    pub length: usize,
    pub seed: u64,
    pub replicas: usize,
}

impl SynthesisRequest {
    pub fn new(graph: QuantileGraph, length: usize, seed: u64) -> Self {
        Self {
            graph,
            length,
            seed,
            replicas: 1,
        }
    }

    pub fn with_replicas(mut self, replicas: usize) -> Self {
        self.replicas = replicas;
        self
    }

    fn check(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::InvalidArgument("length must be positive".into()));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidArgument("replicas must be positive".into()));
        }
        Ok(())
    }
}

/// Precomputed sampling tables for one graph.
#[derive(Debug, Clone)]
pub struct ChainSampler<'g> {
    graph: &'g QuantileGraph,
    cumulative: Vec<Vec<f64>>,
    live: Vec<usize>,
}

impl<'g> ChainSampler<'g> {
    pub fn new(graph: &'g QuantileGraph) -> Result<Self> {
        let live = graph.live_rows();
        if live.is_empty() {
            return Err(Error::DegenerateGraph);
        }
        let cumulative = graph
            .transition_matrix()
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                row.iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            graph,
            cumulative,
            live,
        })
    }

    pub fn graph(&self) -> &QuantileGraph {
        self.graph
    }

    /// Uniform draw among live rows.
    pub fn initial_bin<R: Rng>(&self, rng: &mut R) -> usize {
        self.live[rng.random_range(0..self.live.len())]
    }

    /// Next bin after `k`; dead rows restart uniformly among live rows.
    pub fn next_bin<R: Rng>(&self, k: usize, rng: &mut R) -> usize {
        let cum = &self.cumulative[k];
        let total = *cum.last().expect("q >= 1");
        if total <= 0.0 {
            return self.initial_bin(rng);
        }
        let u = rng.random::<f64>() * total;
        let idx = cum.partition_point(|&c| c <= u);
        if idx < cum.len() && self.graph.transition_matrix()[k][idx] > 0.0 {
            return idx;
        }
        // rounding at the top of the row: take the last bin with mass
        self.graph.transition_matrix()[k]
            .iter()
            .rposition(|&p| p > 0.0)
            .expect("live row has a positive entry")
    }

    /// Uniform value on `(b_k, b_{k+1}]`.
    pub fn value_in<R: Rng>(&self, k: usize, rng: &mut R) -> f64 {
        let (lo, hi) = self.graph.bin_range(k);
        if hi <= lo {
            return hi;
        }
        let u: f64 = rng.random();
        hi - u * (hi - lo)
    }

    /// Walk of `length` steps, emitting `(bin, value)` pairs. The first value
    /// is drawn from `start` (or a uniform live row when `None`).
    pub fn walk<R: Rng>(&self, length: usize, start: Option<usize>, rng: &mut R) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(length);
        if length == 0 {
            return out;
        }
        let mut k = match start {
            Some(k) => k,
            None => self.initial_bin(rng),
        };
        for t in 0..length {
            out.push((k, self.value_in(k, rng)));
            if t + 1 < length {
                k = self.next_bin(k, rng);
            }
        }
        out
    }
}

fn replica_rng(seed: u64, replica: usize) -> StreamRng {
    rng::stream(seed, replica as u64)
}

/// One synthetic series (replica 0 of the request).
pub fn synthesize(request: &SynthesisRequest) -> Result<TimeSeries> {
    request.check()?;
    let sampler = ChainSampler::new(&request.graph)?;
    synthesize_replica(&sampler, request.length, request.seed, 0)
}

fn synthesize_replica(sampler: &ChainSampler<'_>, length: usize, seed: u64, replica: usize) -> Result<TimeSeries> {
    let mut rng = replica_rng(seed, replica);
    let values = sampler
        .walk(length, None, &mut rng)
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    TimeSeries::new(values)
}

/// `request.replicas` series; replica `r` draws from ChaCha stream `r` under
/// `request.seed`.
pub fn synthesize_many(request: &SynthesisRequest) -> Result<Vec<TimeSeries>> {
    request.check()?;
    let sampler = ChainSampler::new(&request.graph)?;
    (0..request.replicas)
        .map(|r| synthesize_replica(&sampler, request.length, request.seed, r))
        .collect()
}

/// Fills gaps with conditioned quantile-graph walks.
///
/// The graph is fitted on observed values and on transitions between
/// consecutive observed points. A gap following an observation continues the
/// chain from that observation's bin, so the first filled value is one
/// transition away from it; a gap at the start of the series begins at a
/// uniform live row. Observed values are copied unchanged.
pub fn impute(series: &TimeSeries, q: usize, seed: u64) -> Result<TimeSeries> {
    if series.is_complete() {
        return Ok(series.clone());
    }
    let graph = qg::map_qg_observed(series, q)?;
    let sampler = ChainSampler::new(&graph)?;
    let mut rng = rng::stream(seed, 0);

    let mut values = series.values().to_vec();
    let n = values.len();
    let mut t = 0;
    while t < n {
        if !series.is_missing(t) {
            t += 1;
            continue;
        }
        let start = t;
        while t < n && series.is_missing(t) {
            t += 1;
        }
        let gap = t - start;
        let filled = if start == 0 {
            sampler.walk(gap, None, &mut rng)
        } else {
            let prev = graph.bin_of(values[start - 1])?;
            let first = sampler.next_bin(prev, &mut rng);
            sampler.walk(gap, Some(first), &mut rng)
        };
        for (i, (_, v)) in filled.into_iter().enumerate() {
            values[start + i] = v;
        }
    }
    let out = series.replace_values(values);
    debug_assert!(out.is_complete());
    Ok(out)
}
