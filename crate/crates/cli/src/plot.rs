//! SVG figures: paired-difference boxplots, series and ACF overlays and PCA
//! biplots.

use qgsynth::eval::{pca, standardize, FeatureMatrix, Origin};
use qgsynth::qg::quantile_bins;
use qgsynth::series::autocorrelations;
use qgsynth::TimeSeries;

use crate::corpus::original_stem;
use crate::error::{CliError, CliResult};
use crate::svg::{colour, Canvas};

/// `synthetic - original` per feature, grouped by model in first-appearance
/// order.
pub fn paired_diff_values(m: &FeatureMatrix) -> Vec<(String, Vec<Vec<f64>>)> {
    let mut groups: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    for (i, row) in m.rows().iter().enumerate() {
        if row.origin != Origin::Synthetic {
            continue;
        }
        let Some(base) = original_stem(&row.id) else { continue };
        let Some(j) = m.rows().iter().position(|r| r.origin == Origin::Original && r.id == base) else {
            continue;
        };
        let diff: Vec<f64> = m.row(i).iter().zip(m.row(j)).map(|(s, o)| s - o).collect();
        match groups.iter_mut().find(|(g, _)| *g == row.model) {
            Some((_, v)) => v.push(diff),
            None => groups.push((row.model.clone(), vec![diff])),
        }
    }
    groups
}

/// Five-number summary plus points beyond 1.5 IQR.
struct BoxStats {
    q1: f64,
    median: f64,
    q3: f64,
    low: f64,
    high: f64,
    outliers: Vec<f64>,
}

fn box_stats(xs: &[f64]) -> BoxStats {
    let b = quantile_bins(xs, 4).expect("nonempty finite sample");
    let (q1, median, q3) = (b[1], b[2], b[3]);
    let fence = 1.5 * (q3 - q1);
    let inside = |x: &&f64| **x >= q1 - fence && **x <= q3 + fence;
    let low = xs.iter().filter(inside).copied().fold(f64::INFINITY, f64::min);
    let high = xs.iter().filter(inside).copied().fold(f64::NEG_INFINITY, f64::max);
    let outliers = xs.iter().filter(|x| !inside(x)).copied().collect();
    BoxStats {
        q1,
        median,
        q3,
        low,
        high,
        outliers,
    }
}

/// One boxplot per feature, one box per model. Returns `(feature, svg)`.
pub fn paired_boxplots(m: &FeatureMatrix) -> CliResult<Vec<(String, String)>> {
    let groups = paired_diff_values(m);
    if groups.is_empty() {
        return Err(CliError::invalid("no synthetic rows with a matching original"));
    }
    let plots = m
        .columns()
        .iter()
        .enumerate()
        .map(|(j, feature)| {
            let samples: Vec<Vec<f64>> = groups
                .iter()
                .map(|(_, d)| d.iter().map(|r| r[j]).collect())
                .collect();
            let all = samples.iter().flatten().copied();
            let (lo, hi) = all.fold((0.0f64, 0.0f64), |(a, b), x| (a.min(x), b.max(x)));
            let span = (hi - lo).max(1e-12);
            let mut c = Canvas::new((0.0, groups.len() as f64), (lo - 0.05 * span, hi + 0.05 * span));
            c.title(&format!("{feature}: synthetic - original"));
            c.axes("", "paired difference", Some(Vec::new()));
            c.hline(0.0, true);
            for (g, ((model, _), xs)) in groups.iter().zip(&samples).enumerate() {
                let s = box_stats(xs);
                let x = g as f64 + 0.5;
                let col = colour(g);
                c.segment((x, s.low), (x, s.q1), "#333", 1.0);
                c.segment((x, s.q3), (x, s.high), "#333", 1.0);
                c.rect((x - 0.3, s.q1), (x + 0.3, s.q3), col);
                c.segment((x - 0.3, s.median), (x + 0.3, s.median), "#000", 2.0);
                for o in &s.outliers {
                    c.circle(x, *o, 2.5, col);
                }
                c.x_category(x, model);
            }
            (feature.clone(), c.finish())
        })
        .collect();
    Ok(plots)
}

fn range(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

/// The first `max_points` observations of both series on shared axes.
pub fn series_overlay(title: &str, original: &TimeSeries, synthetic: &TimeSeries, max_points: usize) -> String {
    let take = |s: &TimeSeries| -> Vec<(f64, f64)> {
        s.values()
            .iter()
            .take(max_points)
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(t, &v)| (t as f64, v))
            .collect()
    };
    let (a, b) = (take(original), take(synthetic));
    let (ylo, yhi) = range(a.iter().chain(&b).map(|p| p.1));
    let n = a.len().max(b.len()).max(2) as f64;
    let mut c = Canvas::new((0.0, n - 1.0), (ylo, yhi));
    c.title(title);
    c.axes("t", "value", None);
    c.polyline(&a, colour(0), 0.9);
    c.polyline(&b, colour(1), 0.7);
    c.legend(&[("original".into(), colour(0)), ("synthetic".into(), colour(1))]);
    c.finish()
}

/// Sample ACF of both series for lags `1..=lags`.
pub fn acf_overlay(title: &str, original: &TimeSeries, synthetic: &TimeSeries, lags: usize) -> CliResult<String> {
    let acf = |s: &TimeSeries| -> CliResult<Vec<(f64, f64)>> {
        let r = autocorrelations(s.complete_values()?, lags)?;
        Ok(r.iter().enumerate().map(|(k, &v)| (k as f64 + 1.0, v)).collect())
    };
    let (a, b) = (acf(original)?, acf(synthetic)?);
    let (lo, hi) = range(a.iter().chain(&b).map(|p| p.1));
    let mut c = Canvas::new((0.0, lags as f64 + 1.0), (lo.min(0.0), hi.max(0.0)));
    c.title(title);
    c.axes("lag", "autocorrelation", None);
    c.hline(0.0, true);
    for (pts, i, dx) in [(&a, 0, -0.15), (&b, 1, 0.15)] {
        for &(k, v) in pts.iter() {
            c.segment((k + dx, 0.0), (k + dx, v), colour(i), 2.0);
        }
    }
    c.legend(&[("original".into(), colour(0)), ("synthetic".into(), colour(1))]);
    Ok(c.finish())
}

/// Scores on the first two components of the standardised features, one
/// colour per model, with loading arrows. Axis labels carry the explained
/// variance.
pub fn pca_biplot(title: &str, m: &FeatureMatrix) -> CliResult<String> {
    let z = standardize(m)?;
    let p = pca(&z, 2)?;
    let (xlo, xhi) = range(p.scores.iter().map(|s| s[0]));
    let (ylo, yhi) = range(p.scores.iter().map(|s| s[1]));
    let pad = |lo: f64, hi: f64| {
        let s = (hi - lo).max(1e-9) * 0.08;
        (lo - s, hi + s)
    };
    let mut c = Canvas::new(pad(xlo, xhi), pad(ylo, yhi));
    c.title(title);
    c.axes(
        &format!("PC1 ({:.1}%)", 100.0 * p.explained_variance_ratio[0]),
        &format!("PC2 ({:.1}%)", 100.0 * p.explained_variance_ratio[1]),
        None,
    );
    c.hline(0.0, true);
    c.vline(0.0, true);
    let mut models: Vec<&str> = Vec::new();
    for (row, s) in m.rows().iter().zip(&p.scores) {
        let g = match models.iter().position(|x| *x == row.model) {
            Some(g) => g,
            None => {
                models.push(&row.model);
                models.len() - 1
            }
        };
        let r = if row.origin == Origin::Original { 3.0 } else { 2.0 };
        c.circle(s[0], s[1], r, colour(g));
    }
    // arrows scaled so the longest loading reaches 80% of the score range
    let reach = 0.8 * xhi.abs().max(xlo.abs()).min(yhi.abs().max(ylo.abs())).max(1e-9);
    let longest = (0..m.ncols())
        .map(|j| p.loadings[0][j].hypot(p.loadings[1][j]))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    for (j, name) in m.columns().iter().enumerate() {
        if z.zero_variance()[j] {
            continue;
        }
        let tip = (reach * p.loadings[0][j] / longest, reach * p.loadings[1][j] / longest);
        c.segment((0.0, 0.0), tip, "#444", 1.2);
        c.text(tip.0, tip.1, name, 10.0, "middle");
    }
    let legend: Vec<(String, &str)> = models.iter().enumerate().map(|(g, m)| (m.to_string(), colour(g))).collect();
    c.legend(&legend);
    Ok(c.finish())
}
