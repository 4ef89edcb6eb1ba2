//! Subcommand definitions and their execution.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use qgsynth::eval::{cluster_report, standardize, ClusterConfig, FeatureMatrix, Origin};
use qgsynth::series::{aggregate, AggregateMethod};
use qgsynth::synth::impute;

use crate::corpus::{self, FeatureOptions, FeatureSet, NamedSeries, SynthOptions};
use crate::error::{CliError, CliResult};
use crate::manifest::{Manifest, OutputDir};
use crate::plot;

#[derive(Parser, Debug)]
#[command(
    name = "qgsynth",
    version,
    about = "Quantile-graph synthesis of time series and fidelity/utility evaluation",
    after_help = "Any subcommand accepts --config FILE with `flag = value` lines; explicit flags win."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a corpus of reference-model series.
    Simulate(SimulateArgs),
    /// Draw synthetic replicas of series through their quantile graphs.
    Synth(SynthArgs),
    /// Extract statistical or network feature tables.
    Features(FeaturesArgs),
    /// Repeated K-means over a range of k with validation indices.
    Cluster(ClusterArgs),
    /// Fill missing values with quantile-graph walks.
    Impute(ImputeArgs),
    /// Aggregate series over fixed windows.
    Aggregate(AggregateArgs),
    /// Simulate, synthesise, extract features and cluster in one run.
    Pipeline(PipelineArgs),
    /// Emit SVG figures from feature tables and series.
    Plot(PlotArgs),
}

impl Command {
    fn out(&self) -> &Path {
        match self {
            Command::Simulate(a) => &a.out,
            Command::Synth(a) => &a.out,
            Command::Features(a) => &a.out,
            Command::Cluster(a) => &a.out,
            Command::Impute(a) => &a.out,
            Command::Aggregate(a) => &a.out,
            Command::Pipeline(a) => &a.out,
            Command::Plot(a) => &a.out,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    /// `all` or a comma-separated list of model labels.
    #[arg(long, default_value = "all")]
    pub models: String,
    /// Series per model.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub length: usize,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "QGSYNTH_OUT", default_value = "qgsynth-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    /// Series CSV file or directory of them; repeatable.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub quantiles: usize,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    /// Synthetic length; defaults to each input's length.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Round synthetic values to the nearest integer.
    #[arg(long)]
    pub integer: bool,
    #[arg(long, env = "QGSYNTH_OUT", default_value = "qgsynth-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct FeaturesArgs {
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = FeatureSet::Stats)]
    pub set: FeatureSet,
    /// Quantile bins of the quantile graph (netf only).
    #[arg(long, default_value_t = 50)]
    pub quantiles: usize,
    /// Average path lengths over this many evenly spaced sources (netf only).
    #[arg(long)]
    pub path_sources: Option<usize>,
    /// Community detection seed (netf only).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "QGSYNTH_OUT", default_value = "qgsynth-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OriginFilter {
    All,
    Original,
    Synthetic,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct ClusterArgs {
    /// Feature CSV; repeatable, rows are concatenated.
    #[arg(long, required = true)]
    pub features: Vec<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 21)]
    pub k_max: usize,
    #[arg(long, default_value_t = 100)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OriginFilter::All)]
    pub origin: OriginFilter,
    #[arg(long, env = "QGSYNTH_OUT", default_value = "qgsynth-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct ImputeArgs {
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub quantiles: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "QGSYNTH_OUT", default_value = "qgsynth-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct AggregateArgs {
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Raw steps per output value.
    #[arg(long)]
    pub window: usize,
    /// `mean` or `sum`.
    #[arg(long, default_value = "mean")]
    pub method: String,
    #[arg(long, env = "QGSYNTH_OUT", default_value = "qgsynth-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct PipelineArgs {
    #[arg(long, default_value = "all")]
    pub models: String,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub length: usize,
    #[arg(long, default_value_t = 50)]
    pub quantiles: usize,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Feature sets to extract; the first one is clustered.
    #[arg(long = "set", value_enum, default_values_t = vec![FeatureSet::Stats])]
    pub sets: Vec<FeatureSet>,
    #[arg(long)]
    pub path_sources: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 21)]
    pub k_max: usize,
    #[arg(long, default_value_t = 100)]
    pub repeats: usize,
    #[arg(long)]
    pub integer: bool,
    /// Also write SVG figures under `plots/`.
    #[arg(long)]
    pub plots: bool,
    #[arg(long, env = "QGSYNTH_OUT", default_value = "qgsynth-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
#[command(args_override_self = true)]
pub struct PlotArgs {
    /// Feature CSV for boxplots and the PCA biplot.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Directory of original series for overlays.
    #[arg(long)]
    pub original: Option<PathBuf>,
    /// Directory of synthetic series (`<stem>_synth_r0.csv`).
    #[arg(long)]
    pub synthetic: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub max_points: usize,
    #[arg(long, default_value_t = 40)]
    pub acf_lags: usize,
    #[arg(long, env = "QGSYNTH_OUT", default_value = "qgsynth-out")]
    pub out: PathBuf,
}

fn config_json<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

/// Fails with an I/O error before anything is written if an input is gone.
fn require_paths<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> CliResult<()> {
    for p in paths {
        if !p.exists() {
            return Err(CliError::Io(format!("{}: no such file or directory", p.display())));
        }
    }
    Ok(())
}

fn positive(name: &str, v: usize) -> CliResult<()> {
    if v == 0 {
        return Err(CliError::invalid(format!("--{name} must be positive")));
    }
    Ok(())
}

fn write_series_set(out: &mut OutputDir, dir: &str, series: &[NamedSeries]) -> CliResult<()> {
    for s in series {
        let rel = if dir.is_empty() {
            format!("{}.csv", s.stem)
        } else {
            format!("{dir}/{}.csv", s.stem)
        };
        out.write(&rel, &corpus::series_csv(&s.series)?)?;
    }
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> CliResult<Manifest> {
    positive("n", a.n)?;
    positive("length", a.length)?;
    let models = corpus::select_models(&a.models)?;
    let series = corpus::simulate_corpus(&models, a.n, a.length, a.burn_in, a.seed)?;
    let mut out = OutputDir::create(&a.out)?;
    write_series_set(&mut out, "", &series)?;
    out.finish("simulate", config_json(a), json!({ "seed": a.seed }))
}

pub fn synth(a: &SynthArgs) -> CliResult<Manifest> {
    require_paths(&a.input)?;
    positive("quantiles", a.quantiles)?;
    positive("replicas", a.replicas)?;
    if a.length == Some(0) {
        return Err(CliError::invalid("--length must be positive"));
    }
    let originals = corpus::read_inputs(&a.input)?;
    let opts = SynthOptions {
        quantiles: a.quantiles,
        replicas: a.replicas,
        length: a.length,
        seed: a.seed,
        integer: a.integer,
    };
    let synthetic = corpus::synthesize_corpus(&originals, &opts)?;
    let mut out = OutputDir::create(&a.out)?;
    write_series_set(&mut out, "", &synthetic)?;
    out.finish("synth", config_json(a), json!({ "seed": a.seed }))
}

pub fn features(a: &FeaturesArgs) -> CliResult<Manifest> {
    require_paths(&a.input)?;
    positive("quantiles", a.quantiles)?;
    let series = corpus::read_inputs(&a.input)?;
    let opts = FeatureOptions {
        set: a.set,
        quantiles: a.quantiles,
        path_sources: a.path_sources,
        seed: a.seed,
    };
    let m = corpus::feature_matrix(&series, &opts)?;
    let mut out = OutputDir::create(&a.out)?;
    out.write(&format!("features_{}.csv", a.set.name()), &corpus::matrix_csv(&m)?)?;
    if let Ok(t) = corpus::paired_differences(&m) {
        out.write(&format!("paired_diffs_{}.csv", a.set.name()), corpus::paired_csv(&t).as_bytes())?;
    }
    out.finish("features", config_json(a), json!({ "community_seed": a.seed }))
}

fn read_features(paths: &[PathBuf]) -> CliResult<FeatureMatrix> {
    let mut acc: Option<FeatureMatrix> = None;
    for p in paths {
        let file = std::fs::File::open(p).map_err(|e| CliError::io(p, e))?;
        let m = FeatureMatrix::read_csv(file).map_err(|e| CliError::at(p, e))?;
        acc = Some(match acc {
            None => m,
            Some(prev) => prev.concat(&m)?,
        });
    }
    acc.ok_or_else(|| CliError::invalid("no feature files given"))
}

fn cluster_files(out: &mut OutputDir, m: &FeatureMatrix, cfg: &ClusterConfig) -> CliResult<()> {
    let z = standardize(m)?;
    for c in z.zero_variance_columns() {
        eprintln!("warning: feature `{c}` is constant and carries no information");
    }
    let report = cluster_report(&z, &z.model_labels(), cfg)?;
    let body = serde_json::to_vec_pretty(&report).map_err(|e| CliError::invalid(e.to_string()))?;
    out.write("cluster_report.json", &body)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    out.write("cluster_report.csv", &csv)?;
    Ok(())
}

pub fn cluster(a: &ClusterArgs) -> CliResult<Manifest> {
    require_paths(&a.features)?;
    let m = read_features(&a.features)?;
    let m = match a.origin {
        OriginFilter::All => m,
        OriginFilter::Original => m.filter_rows(|r| r.origin == Origin::Original),
        OriginFilter::Synthetic => m.filter_rows(|r| r.origin == Origin::Synthetic),
    };
    let cfg = ClusterConfig {
        k_min: a.k_min,
        k_max: a.k_max,
        repeats: a.repeats,
        seed: a.seed,
    };
    let mut out = OutputDir::create(&a.out)?;
    cluster_files(&mut out, &m, &cfg)?;
    out.finish("cluster", config_json(a), json!({ "seed": a.seed }))
}

pub fn impute_cmd(a: &ImputeArgs) -> CliResult<Manifest> {
    require_paths(&a.input)?;
    positive("quantiles", a.quantiles)?;
    let series = corpus::read_inputs(&a.input)?;
    let mut out = OutputDir::create(&a.out)?;
    for s in &series {
        let seed = corpus::synthesis_seed(a.seed, &s.stem);
        let filled = impute(&s.series, a.quantiles, seed).map_err(|e| CliError::invalid(format!("{}: {e}", s.stem)))?;
        out.write(&format!("{}_imputed.csv", s.stem), &corpus::series_csv(&filled)?)?;
    }
    out.finish("impute", config_json(a), json!({ "seed": a.seed }))
}

pub fn aggregate_cmd(a: &AggregateArgs) -> CliResult<Manifest> {
    require_paths(&a.input)?;
    positive("window", a.window)?;
    let method: AggregateMethod = a.method.parse()?;
    let series = corpus::read_inputs(&a.input)?;
    let mut out = OutputDir::create(&a.out)?;
    for s in &series {
        let agg = aggregate(&s.series, a.window, method).map_err(|e| CliError::invalid(format!("{}: {e}", s.stem)))?;
        out.write(&format!("{}_agg{}.csv", s.stem, a.window), &corpus::series_csv(&agg)?)?;
    }
    out.finish("aggregate", config_json(a), json!({}))
}

pub fn pipeline(a: &PipelineArgs) -> CliResult<Manifest> {
    positive("n", a.n)?;
    positive("length", a.length)?;
    positive("quantiles", a.quantiles)?;
    positive("replicas", a.replicas)?;
    if a.sets.is_empty() {
        return Err(CliError::invalid("--set needs at least one feature set"));
    }
    let models = corpus::select_models(&a.models)?;
    let originals = corpus::simulate_corpus(&models, a.n, a.length, None, a.seed)?;
    let opts = SynthOptions {
        quantiles: a.quantiles,
        replicas: a.replicas,
        length: None,
        seed: a.seed,
        integer: a.integer,
    };
    let synthetic = corpus::synthesize_corpus(&originals, &opts)?;
    let all: Vec<NamedSeries> = originals.iter().chain(&synthetic).cloned().collect();

    let mut matrices = Vec::new();
    for &set in &a.sets {
        let fo = FeatureOptions {
            set,
            quantiles: a.quantiles,
            path_sources: a.path_sources,
            seed: a.seed,
        };
        matrices.push((set, corpus::feature_matrix(&all, &fo)?));
    }
    let cfg = ClusterConfig {
        k_min: a.k_min,
        k_max: a.k_max,
        repeats: a.repeats,
        seed: a.seed,
    };

    let mut out = OutputDir::create(&a.out)?;
    write_series_set(&mut out, "original", &originals)?;
    write_series_set(&mut out, "synthetic", &synthetic)?;
    for (set, m) in &matrices {
        out.write(&format!("features_{}.csv", set.name()), &corpus::matrix_csv(m)?)?;
        let t = corpus::paired_differences(m)?;
        out.write(&format!("paired_diffs_{}.csv", set.name()), corpus::paired_csv(&t).as_bytes())?;
    }
    cluster_files(&mut out, &matrices[0].1, &cfg)?;
    if a.plots {
        for (set, m) in &matrices {
            emit_feature_plots(&mut out, m, set.name())?;
        }
        let by_stem = |stem: &str| synthetic.iter().find(|s| s.stem == corpus::synth_stem(stem, 0));
        for o in &originals {
            if let Some(s) = by_stem(&o.stem) {
                emit_pair_plots(&mut out, o, s, 1000, 40)?;
            }
        }
    }
    out.finish("pipeline", config_json(a), json!({ "seed": a.seed }))
}

fn emit_feature_plots(out: &mut OutputDir, m: &FeatureMatrix, tag: &str) -> CliResult<()> {
    for (feature, svg) in plot::paired_boxplots(m)? {
        out.write(&format!("plots/boxplot_{tag}_{feature}.svg"), svg.as_bytes())?;
    }
    let svg = plot::pca_biplot(&format!("PCA of {tag} features"), m)?;
    out.write(&format!("plots/pca_{tag}.svg"), svg.as_bytes())?;
    Ok(())
}

fn emit_pair_plots(out: &mut OutputDir, o: &NamedSeries, s: &NamedSeries, points: usize, lags: usize) -> CliResult<()> {
    let svg = plot::series_overlay(&format!("{}: original vs synthetic", o.stem), &o.series, &s.series, points);
    out.write(&format!("plots/overlay_{}.svg", o.stem), svg.as_bytes())?;
    let svg = plot::acf_overlay(&format!("{}: ACF", o.stem), &o.series, &s.series, lags)
        .map_err(|e| CliError::invalid(format!("{}: {e}", o.stem)))?;
    out.write(&format!("plots/acf_{}.svg", o.stem), svg.as_bytes())?;
    Ok(())
}

fn synthetic_partner(dir: &Path, stem: &str) -> Option<PathBuf> {
    let p = dir.join(format!("{}.csv", corpus::synth_stem(stem, 0)));
    p.is_file().then_some(p)
}

pub fn plot_cmd(a: &PlotArgs) -> CliResult<Manifest> {
    require_paths(a.features.iter().chain(&a.original).chain(&a.synthetic))?;
    if a.features.is_none() && a.original.is_none() {
        return Err(CliError::invalid("nothing to plot: give --features and/or --original"));
    }
    positive("max-points", a.max_points)?;
    positive("acf-lags", a.acf_lags)?;
    let feats = a.features.as_ref().map(|p| read_features(std::slice::from_ref(p))).transpose()?;
    let originals = a.original.as_ref().map(|p| corpus::read_inputs(std::slice::from_ref(p))).transpose()?;

    let mut out = OutputDir::create(&a.out)?;
    if let Some(m) = &feats {
        let tag = a.features.as_deref().map(corpus::file_stem).unwrap_or_default();
        emit_feature_plots(&mut out, m, tag.trim_start_matches("features_"))?;
    }
    if let Some(originals) = &originals {
        let syn_dir = a.synthetic.clone().or_else(|| a.original.clone()).unwrap_or_default();
        for o in originals.iter().filter(|o| o.origin == Origin::Original) {
            if let Some(p) = synthetic_partner(&syn_dir, &o.stem) {
                let s = corpus::read_named(&p)?;
                emit_pair_plots(&mut out, o, &s, a.max_points, a.acf_lags)?;
            }
        }
    }
    out.finish("plot", config_json(a), json!({}))
}

/// Parses `argv` (program name first), applies any config file and runs the
/// subcommand.
pub fn run<I, T>(argv: I) -> CliResult<Manifest>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString>,
{
    let argv = crate::config::expand(argv.into_iter().map(Into::into).collect())?;
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            let _ = e.print();
            std::process::exit(0);
        }
        _ => CliError::Invalid(e.render().to_string()),
    })?;
    // inputs are read before the output directory is prepared, so a run
    // that fails early must not leave the previous manifest in place
    crate::manifest::remove_stale(cli.command.out())?;
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Synth(a) => synth(a),
        Command::Features(a) => features(a),
        Command::Cluster(a) => cluster(a),
        Command::Impute(a) => impute_cmd(a),
        Command::Aggregate(a) => aggregate_cmd(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Plot(a) => plot_cmd(a),
    }
}
