//! Statistical fidelity features.
//!
//! Twelve features per series: trend strength, linearity and curvature of
//! the trend, spectral entropy, and the lag-1 autocorrelation plus the sum of
//! the first ten squared autocorrelations of the series, its first and
//! second differences, and the remainder after trend removal.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{autocorrelations, difference_values, mean, sample_variance, TimeSeries};

pub const STAT_FEATURE_NAMES: [&str; 12] = [
    "trend",
    "linearity",
    "curvature",
    "entropy",
    "x_acf1",
    "x_acf10",
    "diff1_acf1",
    "diff1_acf10",
    "diff2_acf1",
    "diff2_acf10",
    "e_acf1",
    "e_acf10",
];

const MIN_DECOMPOSE_LEN: usize = 12;
const MIN_FEATURE_LEN: usize = 64;

/// Named real-valued features of one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    names: Vec<String>,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: names.len(),
                right: values.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::InvalidArgument(format!("duplicate feature `{dup}`")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { names, values })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

fn require_len(xs: &[f64], needed: usize) -> Result<()> {
    if xs.len() < needed {
        Err(Error::TooShort { needed, got: xs.len() })
    } else {
        Ok(())
    }
}

/// Half-width of the trend smoother: the window is `2 * (T / 20) + 1`.
fn trend_half_width(n: usize) -> usize {
    n / 20
}

/// Centred moving average of `xs - xs[0]`; near the ends the window is
/// clipped to the available points.
fn offset_moving_average(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h = trend_half_width(n);
    let base = xs[0];
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for x in xs {
        prefix.push(prefix.last().unwrap() + (x - base));
    }
    (0..n)
        .map(|t| {
            let lo = t.saturating_sub(h);
            let hi = (t + h).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1) as f64
        })
        .collect()
}

/// Centred moving-average trend with window `2 * (T / 20) + 1`.
pub fn moving_average_trend(xs: &[f64]) -> Vec<f64> {
    offset_moving_average(xs).into_iter().map(|a| xs[0] + a).collect()
}

fn decompose_values(xs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    require_len(xs, MIN_DECOMPOSE_LEN)?;
    let avg = offset_moving_average(xs);
    let base = xs[0];
    let trend = avg.iter().map(|a| base + a).collect();
    let remainder = xs.iter().zip(&avg).map(|(x, a)| (x - base) - a).collect();
    Ok((trend, remainder))
}

/// Splits a complete series into trend and remainder.
pub fn trend_decompose(series: &TimeSeries) -> Result<(TimeSeries, TimeSeries)> {
    let (trend, remainder) = decompose_values(series.complete_values()?)?;
    Ok((TimeSeries::new(trend)?, TimeSeries::new(remainder)?))
}

fn trend_strength_values(xs: &[f64], remainder: &[f64]) -> Result<f64> {
    let var = sample_variance(xs);
    if var <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok((1.0 - sample_variance(remainder) / var).max(0.0))
}

/// `max(0, 1 - Var(remainder) / Var(series))`.
pub fn trend_strength(series: &TimeSeries) -> Result<f64> {
    let xs = series.complete_values()?;
    let (_, remainder) = decompose_values(xs)?;
    trend_strength_values(xs, &remainder)
}

/// Unit-norm linear and quadratic polynomials over `0..n`, orthogonal to the
/// constant and to each other.
fn orthonormal_poly(n: usize) -> (Vec<f64>, Vec<f64>) {
    let centre = (n as f64 - 1.0) / 2.0;
    let u: Vec<f64> = (0..n).map(|t| t as f64 - centre).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let nu = norm(&u);
    let p1: Vec<f64> = u.iter().map(|x| x / nu).collect();

    let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
    let m = mean(&sq);
    let mut p2: Vec<f64> = sq.iter().map(|x| x - m).collect();
    let proj = dot(&p2, &p1);
    for (a, b) in p2.iter_mut().zip(&p1) {
        *a -= proj * b;
    }
    let n2 = norm(&p2);
    for a in p2.iter_mut() {
        *a /= n2;
    }
    (p1, p2)
}

fn poly_coefficients(trend: &[f64]) -> (f64, f64) {
    let (p1, p2) = orthonormal_poly(trend.len());
    let lin = trend.iter().zip(&p1).map(|(a, b)| a * b).sum();
    let curv = trend.iter().zip(&p2).map(|(a, b)| a * b).sum();
    (lin, curv)
}

/// Coefficients of the trend on orthonormal linear and quadratic time
/// polynomials.
pub fn linearity_curvature(series: &TimeSeries) -> Result<(f64, f64)> {
    let xs = series.complete_values()?;
    require_len(xs, 3)?;
    let trend = if xs.len() >= MIN_DECOMPOSE_LEN {
        moving_average_trend(xs)
    } else {
        xs.to_vec()
    };
    Ok(poly_coefficients(&trend))
}

fn spectral_entropy_values(xs: &[f64]) -> Result<f64> {
    require_len(xs, MIN_FEATURE_LEN)?;
    let n = xs.len();
    let m = mean(xs);
    let mut buf: Vec<Complex<f64>> = xs.iter().map(|x| Complex::new(x - m, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf[1..=n / 2].iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    if !(total > 0.0) || sample_variance(xs) <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    let h: f64 = power
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| {
            let q = p / total;
            -q * q.ln()
        })
        .sum();
    Ok(h / (power.len() as f64).ln())
}

/// Normalised Shannon entropy of the periodogram (DC excluded).
pub fn spectral_entropy(series: &TimeSeries) -> Result<f64> {
    spectral_entropy_values(series.complete_values()?)
}

/// `(r_1, sum_{k=1..10} r_k^2)`.
fn acf_pair(xs: &[f64]) -> Result<(f64, f64)> {
    let r = autocorrelations(xs, 10)?;
    Ok((r[0], r.iter().map(|x| x * x).sum()))
}

/// The twelve statistical features, in `STAT_FEATURE_NAMES` order.
pub fn stat_features(series: &TimeSeries) -> Result<FeatureVector> {
    let xs = series.complete_values()?;
    require_len(xs, MIN_FEATURE_LEN)?;
    let (trend, remainder) = decompose_values(xs)?;
    let strength = trend_strength_values(xs, &remainder)?;
    let (lin, curv) = poly_coefficients(&trend);
    let entropy = spectral_entropy_values(xs)?;
    let (x1, x10) = acf_pair(xs)?;
    let (d1_1, d1_10) = acf_pair(&difference_values(xs, 1)?)?;
    let (d2_1, d2_10) = acf_pair(&difference_values(xs, 2)?)?;
    let (e1, e10) = acf_pair(&remainder)?;
    FeatureVector::new(
        STAT_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        vec![strength, lin, curv, entropy, x1, x10, d1_1, d1_10, d2_1, d2_10, e1, e10],
    )
}

/// Mean and standard deviation of `synthetic - original`, per model and
/// feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedDiffTable {
    pub features: Vec<String>,
    pub rows: Vec<PairedDiffRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedDiffRow {
    pub model: String,
    pub n: usize,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl PairedDiffTable {
    pub fn row(&self, model: &str) -> Option<&PairedDiffRow> {
        self.rows.iter().find(|r| r.model == model)
    }

    /// `(mean, sd)` of one model/feature cell.
    pub fn get(&self, model: &str, feature: &str) -> Option<(f64, f64)> {
        let j = self.features.iter().position(|f| f == feature)?;
        self.row(model).map(|r| (r.mean[j], r.sd[j]))
    }
}

/// Groups paired feature vectors by label (first-appearance order) and
/// summarises their differences. Standard deviations use `n - 1`; a single
/// pair has sd 0.
pub fn paired_diff_table(
    originals: &[FeatureVector],
    synthetics: &[FeatureVector],
    labels: &[String],
) -> Result<PairedDiffTable> {
    if originals.len() != synthetics.len() {
        return Err(Error::LengthMismatch {
            left: originals.len(),
            right: synthetics.len(),
        });
    }
    if originals.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: originals.len(),
            right: labels.len(),
        });
    }
    let features = match originals.first() {
        Some(f) => f.names().to_vec(),
        None => return Ok(PairedDiffTable { features: Vec::new(), rows: Vec::new() }),
    };
    for fv in originals.iter().chain(synthetics) {
        if fv.names() != features.as_slice() {
            return Err(Error::InvalidArgument("feature vectors have different names".into()));
        }
    }

    let mut order: Vec<&str> = Vec::new();
    for l in labels {
        if !order.contains(&l.as_str()) {
            order.push(l);
        }
    }
    let rows = order
        .into_iter()
        .map(|model| {
            let diffs: Vec<Vec<f64>> = labels
                .iter()
                .enumerate()
                .filter(|(_, l)| *l == model)
                .map(|(i, _)| {
                    synthetics[i]
                        .values()
                        .iter()
                        .zip(originals[i].values())
                        .map(|(s, o)| s - o)
                        .collect()
                })
                .collect();
            let n = diffs.len();
            let (mean, sd) = (0..features.len())
                .map(|j| {
                    let col: Vec<f64> = diffs.iter().map(|d| d[j]).collect();
                    (crate::series::mean(&col), sample_variance(&col).sqrt())
                })
                .unzip();
            PairedDiffRow { model: model.to_string(), n, mean, sd }
        })
        .collect();
    Ok(PairedDiffTable { features, rows })
}
