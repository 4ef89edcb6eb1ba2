//! Named series collections, seeds and the stage functions shared by the
//! subcommands.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qgsynth::eval::{FeatureMatrix, Origin, RowLabel};
use qgsynth::netf::{netf_vector_with, GraphFeatureConfig, NetfConfig};
use qgsynth::simulate::{reference_models, simulate, ModelSpec};
use qgsynth::stats::{paired_diff_table, stat_features, FeatureVector, PairedDiffTable};
use qgsynth::synth::{synthesize_many, SynthesisRequest};
use qgsynth::{io, qg, rng, TimeSeries};

use crate::error::{CliError, CliResult};

pub const SYNTH_SUFFIX: &str = "_synth_r";

#[derive(Debug, Clone, PartialEq)]
pub struct NamedSeries {
    /// File stem, also the row id in feature tables.
    pub stem: String,
    pub model: String,
    pub origin: Origin,
    pub series: TimeSeries,
}

/// FNV-1a, used to give each file stem a stable seed offset.
pub fn stem_hash(stem: &str) -> u64 {
    stem.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Model and origin implied by a stem: `<model>_<i>` is an original and
/// `<model>_<i>_synth_r<r>` one of its replicas. Stems without an index
/// suffix name their own model.
pub fn parse_stem(stem: &str) -> (String, Origin) {
    let (base, origin) = match stem.rfind(SYNTH_SUFFIX) {
        Some(at) if stem[at + SYNTH_SUFFIX.len()..].bytes().all(|b| b.is_ascii_digit()) => {
            (&stem[..at], Origin::Synthetic)
        }
        _ => (stem, Origin::Original),
    };
    let model = match base.rsplit_once('_') {
        Some((m, idx)) if !m.is_empty() && !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) => m,
        _ => base,
    };
    (model.to_string(), origin)
}

/// Original stem of a synthetic replica stem.
pub fn original_stem(stem: &str) -> Option<&str> {
    stem.rfind(SYNTH_SUFFIX).map(|at| &stem[..at])
}

pub fn synth_stem(stem: &str, replica: usize) -> String {
    format!("{stem}{SYNTH_SUFFIX}{replica}")
}

/// `all` or a comma-separated list of reference model labels.
pub fn select_models(spec: &str) -> CliResult<Vec<(usize, &'static str, ModelSpec)>> {
    let all: Vec<(usize, &'static str, ModelSpec)> = reference_models()
        .into_iter()
        .enumerate()
        .map(|(i, (l, s))| (i, l, s))
        .collect();
    if spec.trim() == "all" {
        return Ok(all);
    }
    spec.split(',')
        .map(|name| {
            let name = name.trim();
            all.iter().find(|(_, l, _)| *l == name).cloned().ok_or_else(|| {
                let known: Vec<&str> = all.iter().map(|(_, l, _)| *l).collect();
                CliError::invalid(format!("unknown model `{name}`; known: {}", known.join(", ")))
            })
        })
        .collect()
}

/// Seed of series `index` of reference model `model_index`.
pub fn simulation_seed(seed: u64, model_index: usize, index: usize) -> u64 {
    rng::derive_seed(seed, &[model_index as u64, index as u64])
}

pub fn synthesis_seed(seed: u64, stem: &str) -> u64 {
    rng::derive_seed(seed, &[stem_hash(stem)])
}

pub fn simulate_corpus(
    models: &[(usize, &str, ModelSpec)],
    n: usize,
    length: usize,
    burn_in: Option<usize>,
    seed: u64,
) -> CliResult<Vec<NamedSeries>> {
    let jobs: Vec<(usize, &str, ModelSpec, usize)> = models
        .iter()
        .flat_map(|(mi, label, spec)| {
            let mut spec = spec.clone();
            if let Some(b) = burn_in {
                spec.burn_in = b;
            }
            (0..n).map(move |i| (*mi, *label, spec.clone(), i))
        })
        .collect();
    jobs.into_par_iter()
        .map(|(mi, label, spec, i)| {
            let series = simulate(&spec, length, simulation_seed(seed, mi, i))?;
            Ok(NamedSeries {
                stem: format!("{label}_{i}"),
                model: label.to_string(),
                origin: Origin::Original,
                series,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub quantiles: usize,
    pub replicas: usize,
    pub length: Option<usize>,
    pub seed: u64,
    pub integer: bool,
}

/// Replicas of every series, in input order with replicas adjacent.
pub fn synthesize_corpus(originals: &[NamedSeries], opts: &SynthOptions) -> CliResult<Vec<NamedSeries>> {
    let per: Vec<Vec<NamedSeries>> = originals
        .par_iter()
        .map(|o| {
            let ctx = |e: qgsynth::Error| CliError::invalid(format!("{}: {e}", o.stem));
            let g = qg::map_qg(&o.series, opts.quantiles).map_err(ctx)?;
            let length = opts.length.unwrap_or(o.series.len());
            let req = SynthesisRequest::new(g, length, synthesis_seed(opts.seed, &o.stem)).with_replicas(opts.replicas);
            let reps = synthesize_many(&req).map_err(ctx)?;
            reps.into_iter()
                .enumerate()
                .map(|(r, s)| {
                    let s = if opts.integer {
                        TimeSeries::new(s.values().iter().map(|v| v.round()).collect()).map_err(ctx)?
                    } else {
                        s
                    };
                    Ok(NamedSeries {
                        stem: synth_stem(&o.stem, r),
                        model: o.model.clone(),
                        origin: Origin::Synthetic,
                        series: s,
                    })
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Stats,
    Netf,
}

impl FeatureSet {
    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::Stats => "stats",
            FeatureSet::Netf => "netf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureOptions {
    pub set: FeatureSet,
    pub quantiles: usize,
    pub path_sources: Option<usize>,
    pub seed: u64,
}

pub fn features_of(s: &NamedSeries, opts: &FeatureOptions) -> CliResult<FeatureVector> {
    let fv = match opts.set {
        FeatureSet::Stats => stat_features(&s.series),
        FeatureSet::Netf => {
            let cfg = NetfConfig {
                quantiles: opts.quantiles,
                graph: GraphFeatureConfig {
                    community_seed: opts.seed,
                    max_path_sources: opts.path_sources,
                },
            };
            netf_vector_with(&s.series, &cfg)
        }
    };
    fv.map_err(|e| CliError::invalid(format!("{}: {e}", s.stem)))
}

pub fn feature_matrix(series: &[NamedSeries], opts: &FeatureOptions) -> CliResult<FeatureMatrix> {
    let vectors: Vec<FeatureVector> = series.par_iter().map(|s| features_of(s, opts)).collect::<CliResult<_>>()?;
    let rows = series
        .iter()
        .map(|s| RowLabel::new(s.stem.clone(), s.model.clone(), s.origin))
        .collect();
    Ok(FeatureMatrix::from_vectors(rows, &vectors)?)
}

/// Pairs every synthetic row with the original it was drawn from and
/// tabulates `synthetic - original` per model.
pub fn paired_differences(m: &FeatureMatrix) -> CliResult<PairedDiffTable> {
    let mut originals = Vec::new();
    let mut synthetics = Vec::new();
    let mut labels = Vec::new();
    let vector = |i: usize| FeatureVector::new(m.columns().to_vec(), m.row(i).to_vec());
    for (i, row) in m.rows().iter().enumerate() {
        if row.origin != Origin::Synthetic {
            continue;
        }
        let Some(base) = original_stem(&row.id) else { continue };
        let Some(j) = m.rows().iter().position(|r| r.origin == Origin::Original && r.id == base) else {
            continue;
        };
        originals.push(vector(j)?);
        synthetics.push(vector(i)?);
        labels.push(row.model.clone());
    }
    if labels.is_empty() {
        return Err(CliError::invalid("no synthetic rows with a matching original"));
    }
    Ok(paired_diff_table(&originals, &synthetics, &labels)?)
}

pub fn paired_csv(t: &PairedDiffTable) -> String {
    let mut out = String::from("model,feature,n,mean,sd\n");
    for row in &t.rows {
        for (j, f) in t.features.iter().enumerate() {
            out.push_str(&format!("{},{f},{},{:?},{:?}\n", row.model, row.n, row.mean[j], row.sd[j]));
        }
    }
    out
}

pub fn series_csv(s: &TimeSeries) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    io::write_series(s, &mut buf)?;
    Ok(buf)
}

pub fn matrix_csv(m: &FeatureMatrix) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    m.write_csv(&mut buf)?;
    Ok(buf)
}

/// CSV files named by `path`: the file itself, or a directory's `*.csv`
/// entries sorted by name.
pub fn csv_files(path: &Path) -> CliResult<Vec<PathBuf>> {
    let meta = std::fs::metadata(path).map_err(|e| CliError::io(path, e))?;
    if meta.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CliError::io(path, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| CliError::io(path, err)))
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::invalid(format!("{}: no .csv files", path.display())));
    }
    Ok(files)
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn read_named(path: &Path) -> CliResult<NamedSeries> {
    let series = io::read_series_file(path).map_err(|e| CliError::at(path, e))?;
    let stem = file_stem(path);
    let (model, origin) = parse_stem(&stem);
    Ok(NamedSeries {
        stem,
        model,
        origin,
        series,
    })
}

/// Every series under the given paths, in argument then name order.
pub fn read_inputs(paths: &[PathBuf]) -> CliResult<Vec<NamedSeries>> {
    let files: Vec<PathBuf> = paths
        .iter()
        .map(|p| csv_files(p))
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    files.par_iter().map(|f| read_named(f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems() {
        assert_eq!(parse_stem("AR1_0.5_3"), ("AR1_0.5".into(), Origin::Original));
        assert_eq!(parse_stem("AR1_neg0.5_3_synth_r0"), ("AR1_neg0.5".into(), Origin::Synthetic));
        assert_eq!(parse_stem("WN_12_synth_r10"), ("WN".into(), Origin::Synthetic));
        assert_eq!(parse_stem("meter"), ("meter".into(), Origin::Original));
        assert_eq!(parse_stem("_7"), ("_7".into(), Origin::Original));
        assert_eq!(original_stem("GARCH_1_synth_r2"), Some("GARCH_1"));
        assert_eq!(synth_stem("x_0", 4), "x_0_synth_r4");
    }

    #[test]
    fn model_selection() {
        assert_eq!(select_models("all").unwrap().len(), 11);
        let two = select_models("WN, INAR").unwrap();
        assert_eq!(two.iter().map(|m| m.1).collect::<Vec<_>>(), ["WN", "INAR"]);
        assert_eq!(two[1].0, 10);
        assert!(select_models("WN,nope").is_err());
    }

    #[test]
    fn subset_reproduces_full_corpus() {
        let all = simulate_corpus(&select_models("all").unwrap(), 2, 100, None, 4).unwrap();
        let one = simulate_corpus(&select_models("GARCH").unwrap(), 2, 100, None, 4).unwrap();
        let from_all: Vec<_> = all.into_iter().filter(|s| s.model == "GARCH").collect();
        assert_eq!(from_all, one);
    }

    #[test]
    fn integer_replicas_and_pairing() {
        let orig = simulate_corpus(&select_models("INAR,WN").unwrap(), 2, 300, None, 1).unwrap();
        let opts = SynthOptions {
            quantiles: 10,
            replicas: 2,
            length: None,
            seed: 3,
            integer: true,
        };
        let syn = synthesize_corpus(&orig, &opts).unwrap();
        assert_eq!(syn.len(), 8);
        assert_eq!(syn[1].stem, "INAR_0_synth_r1");
        assert!(syn.iter().all(|s| s.series.values().iter().all(|v| v.fract() == 0.0)));

        let all: Vec<NamedSeries> = orig.iter().chain(&syn).cloned().collect();
        let fo = FeatureOptions {
            set: FeatureSet::Stats,
            quantiles: 10,
            path_sources: None,
            seed: 0,
        };
        let m = feature_matrix(&all, &fo).unwrap();
        let t = paired_differences(&m).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].n, 4);
        assert!(paired_csv(&t).starts_with("model,feature,n,mean,sd\nINAR,trend,4,"));
    }
}
