//! Repeated clustering over a range of k and the silhouette-based choice of k.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::kmeans::lloyd;
use crate::eval::matrix::FeatureMatrix;
use crate::eval::metrics::{ari, nmi, silhouette};
use crate::rng;
use crate::series::{mean, sample_variance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KScore {
    pub k: usize,
    pub mean_as: f64,
    pub sd_as: f64,
    pub mean_ari: f64,
    pub sd_ari: f64,
    pub mean_nmi: f64,
    pub sd_nmi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub repeats: usize,
    pub seed: u64,
    pub scores: Vec<KScore>,
    pub k_star: usize,
}

impl ClusterReport {
    pub fn score(&self, k: usize) -> Option<&KScore> {
        self.scores.iter().find(|s| s.k == k)
    }

    /// One row per k: `k,mean_as,sd_as,mean_ari,sd_ari,mean_nmi,sd_nmi`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(writer);
        writeln!(w, "k,mean_as,sd_as,mean_ari,sd_ari,mean_nmi,sd_nmi")?;
        for s in &self.scores {
            writeln!(
                w,
                "{},{:?},{:?},{:?},{:?},{:?},{:?}",
                s.k, s.mean_as, s.sd_as, s.mean_ari, s.sd_ari, s.mean_nmi, s.sd_nmi
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            k_min: 2,
            k_max: 21,
            repeats: 100,
            seed: 0,
        }
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let sd = if xs.len() > 1 { sample_variance(xs).sqrt() } else { 0.0 };
    (mean(xs), sd)
}

/// AS, ARI and NMI of single K-means runs, `repeats` per k. Repeat `r` at
/// a given k uses stream `r` of a seed derived from `(seed, k)`. ARI and NMI
/// are taken against `truth`.
pub fn cluster_report(m: &FeatureMatrix, truth: &[usize], cfg: &ClusterConfig) -> Result<ClusterReport> {
    if truth.len() != m.nrows() {
        return Err(Error::LengthMismatch {
            left: m.nrows(),
            right: truth.len(),
        });
    }
    if cfg.k_min < 2 || cfg.k_max < cfg.k_min {
        return Err(Error::InvalidArgument(format!(
            "invalid k range {}..={}",
            cfg.k_min, cfg.k_max
        )));
    }
    if m.nrows() < cfg.k_max {
        return Err(Error::TooFewRows {
            needed: cfg.k_max,
            got: m.nrows(),
        });
    }
    if cfg.repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be positive".into()));
    }
    let data = m.data();
    let scores = (cfg.k_min..=cfg.k_max)
        .map(|k| {
            let k_seed = rng::derive_seed(cfg.seed, &[k as u64]);
            let runs: Vec<(f64, f64, f64)> = (0..cfg.repeats as u64)
                .into_par_iter()
                .map(|r| {
                    let c = lloyd(data, k, &mut rng::stream(k_seed, r));
                    // Lloyd can end with fewer distinct labels than k only on
                    // duplicate-heavy data; a single cluster scores 0
                    let s = match silhouette(data, &c.labels) {
                        Ok(s) => s,
                        Err(Error::SingleCluster) => 0.0,
                        Err(e) => return Err(e),
                    };
                    Ok((s, ari(&c.labels, truth)?, nmi(&c.labels, truth)?))
                })
                .collect::<Result<_>>()?;
            let pick = |f: fn(&(f64, f64, f64)) -> f64| runs.iter().map(f).collect::<Vec<_>>();
            let (mean_as, sd_as) = mean_sd(&pick(|r| r.0));
            let (mean_ari, sd_ari) = mean_sd(&pick(|r| r.1));
            let (mean_nmi, sd_nmi) = mean_sd(&pick(|r| r.2));
            Ok(KScore {
                k,
                mean_as,
                sd_as,
                mean_ari,
                sd_ari,
                mean_nmi,
                sd_nmi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let k_star = select_k(&scores)?;
    Ok(ClusterReport {
        repeats: cfg.repeats,
        seed: cfg.seed,
        scores,
        k_star,
    })
}

/// `argmax_k (mean_as - sd_as / 2)`, smaller k on ties.
pub fn select_k(scores: &[KScore]) -> Result<usize> {
    let mut sorted: Vec<&KScore> = scores.iter().collect();
    sorted.sort_by_key(|s| s.k);
    sorted
        .into_iter()
        .fold(None, |best: Option<(usize, f64)>, s| {
            let v = s.mean_as - 0.5 * s.sd_as;
            match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((s.k, v)),
            }
        })
        .map(|(k, _)| k)
        .ok_or(Error::EmptyReport)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::matrix::{Origin, RowLabel};
    use rand_distr::{Distribution, StandardNormal};

    fn score(k: usize, mean_as: f64, sd_as: f64) -> KScore {
        KScore {
            k,
            mean_as,
            sd_as,
            mean_ari: 0.0,
            sd_ari: 0.0,
            mean_nmi: 0.0,
            sd_nmi: 0.0,
        }
    }

    #[test]
    fn select_k_rule() {
        assert_eq!(select_k(&[score(2, 0.5, 0.0), score(3, 0.7, 0.0)]).unwrap(), 3);
        assert_eq!(select_k(&[score(2, 0.7, 0.2), score(3, 0.7, 0.0)]).unwrap(), 3);
        assert_eq!(select_k(&[score(3, 0.6, 0.0), score(2, 0.6, 0.0)]).unwrap(), 2);
        assert!(matches!(select_k(&[]), Err(Error::EmptyReport)));
    }

    #[test]
    fn three_blobs() {
        let mut r = rng::stream(2, 0);
        let centres = [(0.0, 0.0), (20.0, 0.0), (0.0, 20.0)];
        let mut rows = Vec::new();
        let mut data = Vec::new();
        for i in 0..60 {
            let (cx, cy) = centres[i % 3];
            let dx: f64 = StandardNormal.sample(&mut r);
            let dy: f64 = StandardNormal.sample(&mut r);
            data.push(vec![cx + dx, cy + dy]);
            rows.push(RowLabel::new(i.to_string(), format!("m{}", i % 3), Origin::Original));
        }
        let m = FeatureMatrix::new(rows, vec!["x".into(), "y".into()], data).unwrap();
        let truth = m.model_labels();
        let cfg = ClusterConfig {
            k_min: 2,
            k_max: 6,
            repeats: 10,
            seed: 1,
        };
        let rep = cluster_report(&m, &truth, &cfg).unwrap();
        assert_eq!(rep.k_star, 3);
        let s3 = rep.score(3).unwrap();
        assert!(s3.mean_ari > 0.9 && s3.mean_nmi > 0.9);
        for s in &rep.scores {
            assert!((-1.0..=1.0).contains(&s.mean_as) && s.mean_ari <= 1.0);
            assert!((0.0..=1.0).contains(&s.mean_nmi));
            assert!(s.sd_as >= 0.0 && s.sd_ari >= 0.0 && s.sd_nmi >= 0.0);
        }
        assert_eq!(rep, cluster_report(&m, &truth, &cfg).unwrap());

        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("k,mean_as,sd_as,mean_ari,sd_ari,mean_nmi,sd_nmi\n2,"));

        assert!(cluster_report(&m, &truth[1..], &cfg).is_err());
        let bad = ClusterConfig { k_min: 1, ..cfg };
        assert!(cluster_report(&m, &truth, &bad).is_err());
    }
}
