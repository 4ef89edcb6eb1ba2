//! Time series container and the elementary transforms built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered real-valued observations with an optional epoch-second clock.
///
/// Missing positions hold `NaN` in `values` and `true` in the mask; every
/// observed value is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    timestamps: Option<Vec<i64>>,
    missing: Vec<bool>,
}

impl TimeSeries {
    /// Complete series; rejects non-finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let missing = vec![false; values.len()];
        Ok(Self {
            values,
            timestamps: None,
            missing,
        })
    }

    /// Series with gaps. `None` marks a missing observation.
    pub fn from_observations(observations: Vec<Option<f64>>) -> Result<Self> {
        let mut values = Vec::with_capacity(observations.len());
        let mut missing = Vec::with_capacity(observations.len());
        for (i, obs) in observations.into_iter().enumerate() {
            match obs {
                Some(v) if !v.is_finite() => return Err(Error::NonFinite(i)),
                Some(v) => {
                    values.push(v);
                    missing.push(false);
                }
                None => {
                    values.push(f64::NAN);
                    missing.push(true);
                }
            }
        }
        Ok(Self {
            values,
            timestamps: None,
            missing,
        })
    }

    /// Attaches strictly increasing timestamps of matching length.
    pub fn with_timestamps(mut self, timestamps: Vec<i64>) -> Result<Self> {
        if timestamps.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                left: self.values.len(),
                right: timestamps.len(),
            });
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "timestamps must be strictly increasing".into(),
            ));
        }
        self.timestamps = Some(timestamps);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw values, `NaN` at missing positions.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> Option<&[i64]> {
        self.timestamps.as_deref()
    }

    pub fn missing_mask(&self) -> &[bool] {
        &self.missing
    }

    pub fn is_missing(&self, i: usize) -> bool {
        self.missing[i]
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub fn is_complete(&self) -> bool {
        !self.missing.iter().any(|&m| m)
    }

    /// Observed values in time order.
    pub fn observed(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.missing)
            .filter(|(_, &m)| !m)
            .map(|(&v, _)| v)
    }

    /// Values of a complete series, or `MissingValues`.
    pub fn complete_values(&self) -> Result<&[f64]> {
        if self.is_complete() {
            Ok(&self.values)
        } else {
            Err(Error::MissingValues)
        }
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        (!self.missing[i]).then(|| self.values[i])
    }

    /// Same clock and mask, values replaced position by position.
    pub(crate) fn replace_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        let missing = values.iter().map(|v| !v.is_finite()).collect();
        Self {
            values,
            timestamps: self.timestamps.clone(),
            missing,
        }
    }
}

/// Arithmetic mean.
pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Variance with denominator `n - 1`.
pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Biased, mean-centred sample autocorrelations `r_1..=r_max_lag` of a slice.
pub fn autocorrelations(xs: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max_lag must be positive".into()));
    }
    if xs.len() < max_lag + 2 {
        return Err(Error::TooShort {
            needed: max_lag + 2,
            got: xs.len(),
        });
    }
    if let Some(i) = xs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let m = mean(xs);
    let centred: Vec<f64> = xs.iter().map(|x| x - m).collect();
    let denom: f64 = centred.iter().map(|x| x * x).sum();
    if denom <= 0.0 || centred.iter().all(|&x| x == 0.0) {
        return Err(Error::ConstantSeries);
    }
    Ok((1..=max_lag)
        .map(|k| {
            let num: f64 = centred.iter().zip(&centred[k..]).map(|(a, b)| a * b).sum();
            num / denom
        })
        .collect())
}

/// Sample autocorrelation function of a complete series.
pub fn acf(series: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    autocorrelations(series.complete_values()?, max_lag)
}

/// `order`-th difference of a slice; `d_t = y_{t+1} - y_t`.
pub fn difference_values(xs: &[f64], order: usize) -> Result<Vec<f64>> {
    if order == 0 || order > 2 {
        return Err(Error::InvalidArgument("difference order must be 1 or 2".into()));
    }
    if xs.len() <= order {
        return Err(Error::TooShort {
            needed: order + 1,
            got: xs.len(),
        });
    }
    let mut out = xs.to_vec();
    for _ in 0..order {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Differenced series; timestamps (if any) keep the later end of each step.
pub fn difference(series: &TimeSeries, order: usize) -> Result<TimeSeries> {
    let diffs = difference_values(series.complete_values()?, order)?;
    let out = TimeSeries::new(diffs)?;
    match series.timestamps() {
        Some(ts) => out.with_timestamps(ts[order..].to_vec()),
        None => Ok(out),
    }
}

/// Inverse of first differencing: running sum starting from `first`.
pub fn integrate(first: f64, diffs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(diffs.len() + 1);
    out.push(first);
    let mut acc = first;
    for d in diffs {
        acc += d;
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateMethod {
    #[default]
    Mean,
    Sum,
}

impl std::str::FromStr for AggregateMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "sum" => Ok(Self::Sum),
            other => Err(Error::InvalidArgument(format!(
                "unknown aggregation method `{other}`"
            ))),
        }
    }
}

/// Collapses consecutive windows of `window` raw steps into one point each.
///
/// Only observed values contribute; an all-missing window produces a
/// missing point. The trailing partial window is dropped. Output timestamps
/// are those of each window's first step.
pub fn aggregate(series: &TimeSeries, window: usize, method: AggregateMethod) -> Result<TimeSeries> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let n_out = series.len() / window;
    if n_out == 0 {
        return Err(Error::EmptyInput);
    }
    let observations = (0..n_out)
        .map(|w| {
            let range = w * window..(w + 1) * window;
            let obs: Vec<f64> = range.filter_map(|i| series.get(i)).collect();
            if obs.is_empty() {
                None
            } else {
                let total: f64 = obs.iter().sum();
                Some(match method {
                    AggregateMethod::Mean => total / obs.len() as f64,
                    AggregateMethod::Sum => total,
                })
            }
        })
        .collect();
    let out = TimeSeries::from_observations(observations)?;
    match series.timestamps() {
        Some(ts) => out.with_timestamps((0..n_out).map(|w| ts[w * window]).collect()),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut r = rng::stream(seed, 0);
        let mut y = 0.0;
        (0..n + 500)
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut r);
                y = phi * y + e;
                y
            })
            .skip(500)
            .collect()
    }

    #[test]
    fn acf_of_ar1_and_white_noise() {
        let t = 10_000;
        let tol = 3.0 / (t as f64).sqrt();
        let r = acf(&TimeSeries::new(ar1(0.9, t, 3)).unwrap(), 1).unwrap();
        assert!((r[0] - 0.9).abs() <= tol, "{}", r[0]);
        let r = acf(&TimeSeries::new(ar1(0.0, t, 4)).unwrap(), 1).unwrap();
        assert!(r[0].abs() <= tol, "{}", r[0]);
    }

    #[test]
    fn acf_errors() {
        let c = TimeSeries::new(vec![5.0; 4]).unwrap();
        assert!(matches!(acf(&c, 1), Err(Error::ConstantSeries)));
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(acf(&s, 2), Err(Error::TooShort { .. })));
        let g = TimeSeries::from_observations(vec![Some(1.0), None, Some(2.0), Some(0.0)]).unwrap();
        assert!(matches!(acf(&g, 1), Err(Error::MissingValues)));
    }

    #[test]
    fn differences() {
        let s = TimeSeries::new(vec![1.0, 3.0, 6.0, 10.0]).unwrap();
        assert_eq!(difference(&s, 1).unwrap().values(), &[2.0, 3.0, 4.0]);
        assert_eq!(difference(&s, 2).unwrap().values(), &[1.0, 1.0]);
        let ramp = TimeSeries::new((0..20).map(|t| 0.5 * t as f64 - 2.0).collect()).unwrap();
        assert!(difference(&ramp, 1).unwrap().values().iter().all(|&d| d == 0.5));
        let short = TimeSeries::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(difference(&short, 2), Err(Error::TooShort { .. })));
    }

    #[test]
    fn aggregate_windows() {
        let vals: Vec<f64> = (0..120).map(|i| i as f64).collect();
        let ts: Vec<i64> = (0..120).map(|i| 1_600_000_000 + 60 * i).collect();
        let s = TimeSeries::new(vals).unwrap().with_timestamps(ts).unwrap();
        let h = aggregate(&s, 60, AggregateMethod::Mean).unwrap();
        assert_eq!(h.values(), &[29.5, 89.5]);
        assert_eq!(h.timestamps().unwrap(), &[1_600_000_000, 1_600_003_600]);
        let hs = aggregate(&s, 60, AggregateMethod::Sum).unwrap();
        assert_eq!(hs.values(), &[1770.0, 5370.0]);

        let c = TimeSeries::new(vec![2.25; 17]).unwrap();
        let a = aggregate(&c, 4, AggregateMethod::Mean).unwrap();
        assert_eq!(a.len(), 4);
        assert!(a.values().iter().all(|&v| v == 2.25));

        let mut obs = vec![None; 60];
        obs[17] = Some(7.5);
        obs.extend(vec![None; 60]);
        let g = TimeSeries::from_observations(obs).unwrap();
        let a = aggregate(&g, 60, AggregateMethod::Mean).unwrap();
        assert_eq!(a.get(0), Some(7.5));
        assert_eq!(a.get(1), None);

        assert!(matches!(aggregate(&c, 18, AggregateMethod::Mean), Err(Error::EmptyInput)));
    }

    #[test]
    fn invariants_enforced() {
        assert!(matches!(TimeSeries::new(vec![1.0, f64::INFINITY]), Err(Error::NonFinite(1))));
        let s = TimeSeries::new(vec![1.0, 2.0]).unwrap();
        assert!(s.clone().with_timestamps(vec![5, 5]).is_err());
        assert!(s.with_timestamps(vec![5]).is_err());
    }

    proptest! {
        #[test]
        fn acf_affine_invariant(
            xs in prop::collection::vec(-100.0f64..100.0, 12..80),
            a in prop::sample::select(vec![-3.5, -0.25, 0.5, 2.0, 17.0]),
            b in -50.0f64..50.0,
        ) {
            prop_assume!(sample_variance(&xs) > 1e-6);
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let r1 = autocorrelations(&xs, 5).unwrap();
            let r2 = autocorrelations(&ys, 5).unwrap();
            for (u, v) in r1.iter().zip(&r2) {
                prop_assert!((u - v).abs() <= 1e-12, "{} vs {}", u, v);
                prop_assert!(u.abs() <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn difference_then_integrate_roundtrips(xs in prop::collection::vec(-1e3f64..1e3, 2..100)) {
            let ints: Vec<f64> = xs.iter().map(|x| x.round()).collect();
            let d = difference_values(&ints, 1).unwrap();
            prop_assert_eq!(integrate(ints[0], &d), ints);
        }
    }
}
