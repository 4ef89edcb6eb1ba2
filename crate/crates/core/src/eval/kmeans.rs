//! Lloyd's K-means with k-means++ seeding, repeated over independent streams.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::matrix::FeatureMatrix;
use crate::rng;

pub const MAX_ITERATIONS: usize = 300;
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub wcss: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    /// Repeat with the lowest within-cluster sum of squares (first on ties).
    pub best: usize,
    pub runs: Vec<Clustering>,
}

impl KMeansResult {
    pub fn best(&self) -> &Clustering {
        &self.runs[self.best]
    }

    pub fn labels(&self) -> &[usize] {
        &self.runs[self.best].labels
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centre (lowest index on ties) and the squared distance to it.
fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .map(|(c, ctr)| (c, sq_dist(point, ctr)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn plus_plus<R: Rng>(data: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = data.len();
    let mut centers = vec![data[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = data.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    chosen = Some(i);
                    break;
                }
            }
            chosen.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).unwrap_or(0))
        } else {
            rng.random_range(0..n)
        };
        centers.push(data[pick].clone());
        for (d, p) in d2.iter_mut().zip(data) {
            *d = d.min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }
    centers
}

/// A single K-means run driven by `rng`.
pub fn lloyd<R: Rng>(data: &[Vec<f64>], k: usize, rng: &mut R) -> Clustering {
    let dim = data[0].len();
    let mut centers = plus_plus(data, k, rng);
    let mut labels = vec![0usize; data.len()];
    let mut previous = f64::INFINITY;
    let mut wcss = f64::INFINITY;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut dists = vec![0.0; data.len()];
        for (i, p) in data.iter().enumerate() {
            let (c, d) = nearest(p, &centers);
            labels[i] = c;
            dists[i] = d;
        }
        // an empty cluster takes the point farthest from its own centre
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        for c in 0..k {
            if sizes[c] == 0 {
                let far = dists
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| sizes[labels[i]] > 1)
                    .fold(None, |best: Option<(usize, f64)>, (i, &d)| match best {
                        Some((_, bd)) if bd >= d => best,
                        _ => Some((i, d)),
                    });
                if let Some((i, _)) = far {
                    sizes[labels[i]] -= 1;
                    labels[i] = c;
                    sizes[c] = 1;
                    dists[i] = 0.0;
                    centers[c] = data[i].clone();
                }
            }
        }
        let mut sums = vec![vec![0.0; dim]; k];
        for (p, &l) in data.iter().zip(&labels) {
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / sizes[c] as f64).collect();
            }
        }
        wcss = data
            .iter()
            .zip(&labels)
            .map(|(p, &l)| sq_dist(p, &centers[l]))
            .sum();
        if previous.is_finite() && (previous - wcss).abs() <= TOLERANCE * previous.max(f64::MIN_POSITIVE) {
            break;
        }
        if wcss == 0.0 {
            break;
        }
        previous = wcss;
    }
    Clustering {
        labels,
        centers,
        wcss,
        iterations,
    }
}

/// `repeats` independent runs; repeat `r` draws from stream `r` of `seed`.
pub fn kmeans(m: &FeatureMatrix, k: usize, repeats: usize, seed: u64) -> Result<KMeansResult> {
    kmeans_rows(m.data(), k, repeats, seed)
}

pub fn kmeans_rows(data: &[Vec<f64>], k: usize, repeats: usize, seed: u64) -> Result<KMeansResult> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if data.len() < k {
        return Err(Error::TooFewRows {
            needed: k,
            got: data.len(),
        });
    }
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be positive".into()));
    }
    let runs: Vec<Clustering> = (0..repeats as u64)
        .into_par_iter()
        .map(|r| lloyd(data, k, &mut rng::stream(seed, r)))
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .fold(0, |b, (i, c)| if c.wcss < runs[b].wcss { i } else { b });
    Ok(KMeansResult { best, runs })
}
