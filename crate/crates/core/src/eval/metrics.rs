//! Internal and external cluster validation indices.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

fn check_lengths(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

struct Contingency {
    cells: BTreeMap<(usize, usize), u64>,
    rows: BTreeMap<usize, u64>,
    cols: BTreeMap<usize, u64>,
    n: u64,
}

fn contingency(a: &[usize], b: &[usize]) -> Contingency {
    let mut cells = BTreeMap::new();
    let mut rows = BTreeMap::new();
    let mut cols = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *cells.entry((x, y)).or_insert(0) += 1;
        *rows.entry(x).or_insert(0) += 1;
        *cols.entry(y).or_insert(0) += 1;
    }
    Contingency {
        cells,
        rows,
        cols,
        n: a.len() as u64,
    }
}

fn pairs(c: u64) -> i128 {
    let c = c as i128;
    c * (c - 1) / 2
}

/// Adjusted Rand index. Evaluated in integer arithmetic up to one final
/// division, so small hand-checkable cases are exact. Two labelings that
/// both put everything in one cluster (or both use singletons) score 1.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    check_lengths(a, b)?;
    if a.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: a.len(),
        });
    }
    let t = contingency(a, b);
    let index: i128 = t.cells.values().map(|&c| pairs(c)).sum();
    let sa: i128 = t.rows.values().map(|&c| pairs(c)).sum();
    let sb: i128 = t.cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(t.n);
    // (index - sa*sb/total) / ((sa+sb)/2 - sa*sb/total), scaled by 2*total
    let num = 2 * (index * total - sa * sb);
    let den = (sa + sb) * total - 2 * sa * sb;
    if den == 0 {
        return Ok(1.0);
    }
    Ok(num as f64 / den as f64)
}

fn entropy(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information over the arithmetic mean of the two entropies.
/// When both entropies vanish the score is 0.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    check_lengths(a, b)?;
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let t = contingency(a, b);
    let n = t.n as f64;
    let ha = entropy(t.rows.values().copied(), n);
    let hb = entropy(t.cols.values().copied(), n);
    let mi: f64 = t
        .cells
        .iter()
        .map(|(&(x, y), &c)| {
            let pxy = c as f64 / n;
            let px = t.rows[&x] as f64 / n;
            let py = t.cols[&y] as f64 / n;
            pxy * (pxy / (px * py)).ln()
        })
        .sum();
    let denom = 0.5 * (ha + hb);
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok((mi / denom).clamp(0.0, 1.0))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Mean silhouette width under Euclidean distance. Members of singleton
/// clusters score 0, as do points with `a = b = 0`.
pub fn silhouette(data: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if data.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: data.len(),
            right: labels.len(),
        });
    }
    let mut ids: Vec<usize> = labels.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(Error::SingleCluster);
    }
    let slot = |l: usize| ids.binary_search(&l).unwrap();
    let mut size = vec![0usize; ids.len()];
    for &l in labels {
        size[slot(l)] += 1;
    }
    let n = data.len();
    let total: f64 = (0..n)
        .map(|i| {
            let own = slot(labels[i]);
            if size[own] < 2 {
                return 0.0;
            }
            let mut sums = vec![0.0; ids.len()];
            for j in 0..n {
                if j != i {
                    sums[slot(labels[j])] += dist(&data[i], &data[j]);
                }
            }
            let a = sums[own] / (size[own] - 1) as f64;
            let b = (0..ids.len())
                .filter(|&c| c != own)
                .map(|c| sums[c] / size[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m > 0.0 {
                (b - a) / m
            } else {
                0.0
            }
        })
        .sum();
    Ok(total / n as f64)
}
