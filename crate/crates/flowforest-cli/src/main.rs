//! `flowforest` binary: train, evaluate, and sweep flow classifiers from
//! the command line. Subcommands mirror the workflow stages: ingest,
//! rank-features, train, evaluate, sweep, report.

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use flowforest::archive::load_model;
use flowforest::data::class_counts;
use flowforest::featrank::{fuse_ranks, rank_importances, read_importance_csv, select_top_k};
use flowforest::ingest::{encode, impute_all, parse_conn_log_file, EncoderVocab};
use flowforest::metrics::{build_report, MetricsReport};
use flowforest::pipeline::{
    evaluate_log, run_experiment, run_sweep, ModelChoice, PipelineConfig,
};
use flowforest::resample::SamplingStrategy;

#[derive(Parser)]
#[command(name = "flowforest", version, about = "Deep-forest flow classification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a Zeek conn.log and export the encoded feature matrix
    Ingest(IngestArgs),
    /// Fuse per-method feature-importance files into one ranking
    RankFeatures(RankFeaturesArgs),
    /// Train one model and write its report, archive, and manifest
    Train(TrainArgs),
    /// Score a saved model archive against a labeled log
    Evaluate(EvaluateArgs),
    /// Run a model x sampling grid of experiments
    Sweep(SweepArgs),
    /// Pretty-print a previously written report.csv
    Report(ReportArgs),
}

fn parse_model(s: &str) -> Result<ModelChoice, String> {
    s.parse().map_err(|e: flowforest::Error| e.to_string())
}

fn parse_sampling(s: &str) -> Result<SamplingStrategy, String> {
    s.parse().map_err(|e: flowforest::Error| e.to_string())
}

/// Flags shared by every experiment-running subcommand. Values given
/// here override the config file.
#[derive(Args)]
struct CommonArgs {
    /// Zeek conn.log with a label column
    #[arg(long)]
    input: Option<PathBuf>,
    /// TOML experiment config
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Enable multi-grained scanning (deep forest only)
    #[arg(long, conflicts_with = "no_scan")]
    scan: bool,
    /// Disable multi-grained scanning
    #[arg(long)]
    no_scan: bool,
    /// Scanning window width
    #[arg(long)]
    window: Option<usize>,
}

impl CommonArgs {
    fn resolve(&self) -> anyhow::Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)
                .with_context(|| format!("loading {}", path.display()))?,
            None => PipelineConfig::default(),
        };
        if let Some(input) = &self.input {
            cfg.input = input.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out_dir) = &self.out_dir {
            cfg.out_dir = out_dir.clone();
        }
        if self.scan {
            cfg.scan = true;
        }
        if self.no_scan {
            cfg.scan = false;
        }
        if let Some(window) = self.window {
            cfg.window = window;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelChoice>,
    #[arg(long, value_parser = parse_sampling)]
    sampling: Option<SamplingStrategy>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated subset of models; default all three
    #[arg(long, value_delimiter = ',', value_parser = parse_model)]
    models: Vec<ModelChoice>,
    /// Comma-separated subset of sampling strategies; default all four
    #[arg(long, value_delimiter = ',', value_parser = parse_sampling)]
    samplings: Vec<SamplingStrategy>,
    /// Concurrent experiments; 0 = one per core
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RankFeaturesArgs {
    /// One feature,importance CSV per method; the file stem names the
    /// method
    #[arg(required = true, num_args = 2..)]
    importances: Vec<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Also print the k best fused features
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Model archive written by train
    #[arg(long)]
    archive: PathBuf,
    /// Labeled conn.log to score
    #[arg(long)]
    input: PathBuf,
    /// Also write report.csv and report.txt here
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// A report.csv produced by train, evaluate, or sweep
    #[arg(long)]
    input: PathBuf,
}

const ALL_SAMPLINGS: [SamplingStrategy; 4] = [
    SamplingStrategy::None,
    SamplingStrategy::Smote,
    SamplingStrategy::Hybrid,
    SamplingStrategy::Smoteenn,
];

fn ingest(args: &IngestArgs) -> anyhow::Result<()> {
    let parsed = parse_conn_log_file(&args.input)?;
    let records = impute_all(parsed.records);
    let vocab = EncoderVocab::fit(&records);
    let ds = encode(&records, &vocab)?;
    let counts = class_counts(&ds);
    let out = args.out_dir.join("dataset.csv");
    flowforest::archive::write_atomic(&out, &ds.to_csv())?;
    println!(
        "parsed {} flows ({} lines skipped): {} benign, {} malicious",
        ds.n_rows(),
        parsed.skipped,
        counts.get(flowforest::ClassLabel::Benign),
        counts.get(flowforest::ClassLabel::Malicious),
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn rank_features(args: &RankFeaturesArgs) -> anyhow::Result<()> {
    let mut rankings = Vec::with_capacity(args.importances.len());
    let mut universe = BTreeSet::new();
    for path in &args.importances {
        let method = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let importances = read_importance_csv(path)?;
        universe.extend(importances.keys().cloned());
        rankings.push(rank_importances(&importances, &method)?);
    }
    let universe: Vec<String> = universe.into_iter().collect();
    let fused = fuse_ranks(&rankings, &universe)?;
    let out = args.out_dir.join("feature_ranks.csv");
    flowforest::archive::write_atomic(&out, &fused.to_csv())?;
    print!("{}", fused.to_csv());
    println!("wrote {}", out.display());
    if let Some(k) = args.top_k {
        println!("top {k}: {}", select_top_k(&fused, k)?.join(", "));
    }
    Ok(())
}

fn train(args: &TrainArgs) -> anyhow::Result<()> {
    let mut cfg = args.common.resolve()?;
    if let Some(model) = args.model {
        cfg.model = model;
    }
    if let Some(sampling) = args.sampling {
        cfg.sampling = sampling;
    }
    let out = run_experiment(&cfg)?;
    print!("{}", out.report.to_text());
    println!("artifacts in {}", cfg.out_dir.display());
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> anyhow::Result<()> {
    let archive = load_model(&args.archive)
        .with_context(|| format!("loading {}", args.archive.display()))?;
    let row = evaluate_log(&archive, &args.input)?;
    let report = build_report(vec![row]);
    print!("{}", report.to_text());
    if let Some(dir) = &args.out_dir {
        flowforest::archive::write_atomic(&dir.join("report.csv"), &report.to_csv())?;
        flowforest::archive::write_atomic(&dir.join("report.txt"), &report.to_text())?;
        println!("report in {}", dir.display());
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let cfg = args.common.resolve()?;
    let models: &[ModelChoice] = if args.models.is_empty() {
        &ModelChoice::ALL
    } else {
        &args.models
    };
    let samplings: &[SamplingStrategy] = if args.samplings.is_empty() {
        &ALL_SAMPLINGS
    } else {
        &args.samplings
    };
    let report = run_sweep(&cfg, models, samplings, args.workers)?;
    print!("{}", report.to_text());
    println!("artifacts in {}", cfg.out_dir.display());
    Ok(())
}

fn show_report(args: &ReportArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let rows = MetricsReport::from_csv(&text)?;
    print!("{}", build_report(rows).to_text());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Ingest(args) => ingest(&args),
        Command::RankFeatures(args) => rank_features(&args),
        Command::Train(args) => train(&args),
        Command::Evaluate(args) => evaluate(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Report(args) => show_report(&args),
    }
}
