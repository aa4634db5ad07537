//! End-to-end experiment orchestration: one config in, a scored model
//! and a reproducible report out.
//!
//! The stage order enforces the leakage rules: records are split into
//! train and test first, the category vocabulary and the robust scaler
//! are fitted on the training records only, the deep forest's validation
//! slice is carved from the training split, and resampling runs strictly
//! after that carve, so neither test nor validation rows are ever
//! synthesized from or dropped.
//!
//! Every run writes `report.csv`, `report.txt`, `model.json`, and
//! `manifest.json` into the output directory. Nothing written depends on
//! wall-clock time, so rerunning the same config and seed reproduces the
//! artifacts byte for byte.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archive::{
    config_digest, save_model, write_atomic, ModelArchive, TrainedModel, TrainingMetadata,
    ARCHIVE_FORMAT_VERSION,
};
use crate::baselines::{DecisionTreeBaseline, LogRegConfig, LogisticModel};
use crate::cascade::{CascadeConfig, CascadeModel};
use crate::data::{stratified_split_indices, ClassLabel, Dataset, RandomSeed};
use crate::error::{Error, Result};
use crate::forest::ForestConfig;
use crate::ingest::{
    encode, impute_all, parse_conn_log_file, EncoderVocab, FlowRecord, RobustScaler,
};
use crate::metrics::{build_report, confusion, metrics, roc_auc, MetricsReport, MetricsRow};
use crate::model::{label_from_probs, Classifier};
use crate::resample::{apply as resample, ResampleConfig, SamplingStrategy};
use crate::scan::Scanner;
use crate::tree::{SplitMode, TreeParams};

// Seed-derivation tags; every stage draws its own child so changing one
// stage's randomness never shifts another's.
const SPLIT_TAG: u64 = 1;
const VALID_TAG: u64 = 2;
const RESAMPLE_TAG: u64 = 3;
const SCAN_TAG: u64 = 4;
const FIT_TAG: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    DeepForest,
    DecisionTree,
    #[serde(rename = "logreg")]
    LogReg,
}

impl ModelChoice {
    pub const ALL: [ModelChoice; 3] = [
        ModelChoice::DeepForest,
        ModelChoice::DecisionTree,
        ModelChoice::LogReg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelChoice::DeepForest => "deep-forest",
            ModelChoice::DecisionTree => "decision-tree",
            ModelChoice::LogReg => "logreg",
        }
    }
}

impl std::fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModelChoice> {
        match s {
            "deep-forest" => Ok(ModelChoice::DeepForest),
            "decision-tree" => Ok(ModelChoice::DecisionTree),
            "logreg" => Ok(ModelChoice::LogReg),
            other => Err(Error::Config(format!(
                "unknown model {other:?}; expected deep-forest, decision-tree, or logreg"
            ))),
        }
    }
}

/// Cascade hyperparameters as they appear in a config file. The run seed
/// is injected separately so one document drives a whole seed sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CascadeParams {
    pub max_layers: usize,
    pub n_cascade_rf: usize,
    pub trees_per_forest: usize,
    pub cv_folds: usize,
    pub early_stop_patience: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for CascadeParams {
    fn default() -> CascadeParams {
        let c = CascadeConfig::default();
        CascadeParams {
            max_layers: c.max_layers,
            n_cascade_rf: c.n_cascade_rf,
            trees_per_forest: c.trees_per_forest,
            cv_folds: c.cv_folds,
            early_stop_patience: c.early_stop_patience,
            max_depth: c.max_depth,
            min_samples_split: c.min_samples_split,
        }
    }
}

impl CascadeParams {
    pub fn to_config(self, seed: RandomSeed) -> CascadeConfig {
        CascadeConfig {
            max_layers: self.max_layers,
            n_cascade_rf: self.n_cascade_rf,
            trees_per_forest: self.trees_per_forest,
            cv_folds: self.cv_folds,
            early_stop_patience: self.early_stop_patience,
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            seed,
        }
    }
}

/// Single-tree baseline hyperparameters. Defaults are the published
/// benchmark settings: depth 4, split minimum 10, pruning alpha 0.01.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeBaselineParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub ccp_alpha: f64,
}

impl Default for TreeBaselineParams {
    fn default() -> TreeBaselineParams {
        TreeBaselineParams {
            max_depth: Some(4),
            min_samples_split: 10,
            ccp_alpha: 0.01,
        }
    }
}

impl TreeBaselineParams {
    pub fn to_params(self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            ccp_alpha: self.ccp_alpha,
            split_mode: SplitMode::Exhaustive,
            features_per_split: None,
        }
    }
}

/// One experiment, loadable from a TOML document. Every field has a
/// default, so a minimal config is just `input` and `out_dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Fraction of records held out for the final test evaluation.
    pub test_fraction: f64,
    /// Fraction of the training split held out for cascade early
    /// stopping. Only the deep forest consumes it.
    pub validation_fraction: f64,
    pub model: ModelChoice,
    pub sampling: SamplingStrategy,
    /// Multi-grained scanning toggle; applies to the deep forest only.
    pub scan: bool,
    pub window: usize,
    pub smote_k: usize,
    pub enn_k: usize,
    pub hybrid_target: usize,
    pub cascade: CascadeParams,
    pub tree: TreeBaselineParams,
    pub logreg: LogRegConfig,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            input: PathBuf::new(),
            out_dir: PathBuf::from("runs"),
            seed: 0,
            test_fraction: 0.3,
            validation_fraction: 0.2,
            model: ModelChoice::DeepForest,
            sampling: SamplingStrategy::None,
            scan: true,
            window: 2,
            smote_k: 5,
            enn_k: 3,
            hybrid_target: 12_000,
            cascade: CascadeParams::default(),
            tree: TreeBaselineParams::default(),
            logreg: LogRegConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<PipelineConfig> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PipelineConfig::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input.as_os_str().is_empty() {
            return Err(Error::Config("input path is empty".into()));
        }
        for (what, value) in [
            ("test_fraction", self.test_fraction),
            ("validation_fraction", self.validation_fraction),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidParameter {
                    what,
                    requirement: "in (0, 1)",
                    got: value.to_string(),
                });
            }
        }
        self.resample_config().validate()?;
        self.cascade.to_config(RandomSeed(self.seed)).validate()?;
        self.tree.to_params().validate()?;
        if self.scan && self.window == 0 {
            return Err(Error::InvalidParameter {
                what: "window",
                requirement: ">= 1 when scanning",
                got: "0".into(),
            });
        }
        Ok(())
    }

    fn resample_config(&self) -> ResampleConfig {
        ResampleConfig {
            strategy: self.sampling,
            smote_k: self.smote_k,
            enn_k: self.enn_k,
            hybrid_target: self.hybrid_target,
            seed: RandomSeed(self.seed).child(RESAMPLE_TAG),
        }
    }
}

/// The leakage-sensitive products of the preprocessing stages, kept
/// around so tests and callers can audit exactly what the model saw.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub vocab: EncoderVocab,
    pub scaler: RobustScaler,
    /// Scaled training matrix before any resampling.
    pub train: Dataset,
    /// Scaled test matrix; never resampled, never seen during fitting.
    pub test: Dataset,
    /// Indices into the parsed record list for each split.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub parsed_rows: usize,
    pub skipped: usize,
}

/// Parse, impute, split, and fit the encoders. Vocabulary and scaler see
/// training records only; the test split is encoded with them as-is.
pub fn prepare(cfg: &PipelineConfig) -> Result<PreparedData> {
    let parsed = parse_conn_log_file(&cfg.input).map_err(|e| e.at_stage("parse"))?;
    if parsed.skipped > 0 {
        log::warn!("{} unparseable lines skipped in {}", parsed.skipped, cfg.input.display());
    }
    let records = impute_all(parsed.records);
    let labels: Vec<ClassLabel> = records.iter().map(|r| r.label).collect();
    let seed = RandomSeed(cfg.seed);
    let (train_indices, test_indices) =
        stratified_split_indices(&labels, cfg.test_fraction, seed.child(SPLIT_TAG))
            .map_err(|e| e.at_stage("split"))?;
    let pick = |idx: &[usize]| -> Vec<FlowRecord> {
        idx.iter().map(|&i| records[i].clone()).collect()
    };
    let train_records = pick(&train_indices);
    let test_records = pick(&test_indices);
    let vocab = EncoderVocab::fit(&train_records);
    let train_raw = encode(&train_records, &vocab).map_err(|e| e.at_stage("encode"))?;
    let test_raw = encode(&test_records, &vocab).map_err(|e| e.at_stage("encode"))?;
    let scaler = RobustScaler::fit(&train_raw).map_err(|e| e.at_stage("scale"))?;
    let train = scaler.apply(&train_raw).map_err(|e| e.at_stage("scale"))?;
    let test = scaler.apply(&test_raw).map_err(|e| e.at_stage("scale"))?;
    Ok(PreparedData {
        vocab,
        scaler,
        train,
        test,
        train_indices,
        test_indices,
        parsed_rows: records.len(),
        skipped: parsed.skipped,
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub row: MetricsRow,
    pub report: MetricsReport,
    pub archive: ModelArchive,
    pub prepared: PreparedData,
    /// Training matrix actually fed to the model, after the validation
    /// carve and resampling.
    pub fit_set: Dataset,
    /// Early-stopping slice the deep forest held out, if any.
    pub validation: Option<Dataset>,
}

/// Reproducibility sidecar written next to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub crate_version: String,
    pub archive_format_version: u32,
    pub seed: u64,
    pub config_digest: String,
    pub config: PipelineConfig,
    pub rows: ManifestRows,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifestRows {
    pub parsed: usize,
    pub skipped: usize,
    pub train: usize,
    pub test: usize,
    /// Post-resampling size of the set the model was fitted on.
    pub fit: usize,
}

/// Run one configured experiment end to end and write its artifacts.
pub fn run_experiment(cfg: &PipelineConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    let seed = RandomSeed(cfg.seed);

    // The deep forest needs held-out rows for early stopping; carve them
    // out before resampling so synthetic rows never reach validation.
    let (fit_raw, validation) = match cfg.model {
        ModelChoice::DeepForest => {
            let (keep, held) = stratified_split_indices(
                prepared.train.labels(),
                cfg.validation_fraction,
                seed.child(VALID_TAG),
            )
            .map_err(|e| e.at_stage("split"))?;
            (prepared.train.select(&keep), Some(prepared.train.select(&held)))
        }
        _ => (prepared.train.clone(), None),
    };

    let fit_set = resample(&fit_raw, &cfg.resample_config()).map_err(|e| e.at_stage("resample"))?;
    let model = fit_model(cfg, &fit_set, validation.as_ref(), seed).map_err(|e| e.at_stage("fit"))?;

    let evaluate = || -> Result<(MetricsRow, Vec<[f64; 2]>)> {
        let probs = model.predict_proba(&prepared.test)?;
        let predictions: Vec<ClassLabel> = probs.iter().copied().map(label_from_probs).collect();
        let scores: Vec<f64> = probs.iter().map(|p| p[1]).collect();
        let cm = confusion(prepared.test.labels(), &predictions)?;
        let row = MetricsRow::new(
            cfg.model.name(),
            cfg.sampling.to_string(),
            metrics(&cm)?,
            roc_auc(prepared.test.labels(), &scores)?,
        );
        Ok((row, probs))
    };
    let (row, _) = evaluate().map_err(|e| e.at_stage("evaluate"))?;

    let report = build_report(vec![row.clone()]);
    let archive = ModelArchive {
        format_version: ARCHIVE_FORMAT_VERSION,
        model,
        vocab: prepared.vocab.clone(),
        scaler: prepared.scaler.clone(),
        metadata: TrainingMetadata {
            seed: cfg.seed,
            config_digest: config_digest(cfg)?,
            metrics: Some(row.clone()),
        },
    };
    write_outputs(cfg, &report, &archive, &prepared, fit_set.n_rows())
        .map_err(|e| e.at_stage("write"))?;

    Ok(ExperimentOutput {
        row,
        report,
        archive,
        prepared,
        fit_set,
        validation,
    })
}

fn fit_model(
    cfg: &PipelineConfig,
    fit_set: &Dataset,
    validation: Option<&Dataset>,
    seed: RandomSeed,
) -> Result<TrainedModel> {
    let fit_seed = seed.child(FIT_TAG);
    match cfg.model {
        ModelChoice::DeepForest => {
            let valid = validation.ok_or(Error::DegenerateValidation)?;
            let cascade_cfg = cfg.cascade.to_config(fit_seed);
            let model = if cfg.scan {
                let trees = ForestConfig {
                    n_trees: cfg.cascade.trees_per_forest,
                    max_depth: cfg.cascade.max_depth,
                    min_samples_split: cfg.cascade.min_samples_split,
                    ..ForestConfig::default()
                };
                let scanner =
                    Scanner::fit(fit_set, cfg.window, 1, &trees, seed.child(SCAN_TAG))?;
                CascadeModel::fit_with_scanner(fit_set, valid, &cascade_cfg, scanner)?
            } else {
                CascadeModel::fit(fit_set, valid, &cascade_cfg)?
            };
            Ok(TrainedModel::DeepForest(model))
        }
        ModelChoice::DecisionTree => {
            if cfg.scan {
                log::info!("scanning applies to the deep forest only; decision tree uses raw features");
            }
            Ok(TrainedModel::DecisionTree(DecisionTreeBaseline::fit(
                fit_set,
                &cfg.tree.to_params(),
                fit_seed,
            )?))
        }
        ModelChoice::LogReg => {
            if cfg.scan {
                log::info!("scanning applies to the deep forest only; logreg uses raw features");
            }
            Ok(TrainedModel::LogReg(LogisticModel::fit(
                fit_set,
                &cfg.logreg,
                fit_seed,
            )?))
        }
    }
}

fn write_outputs(
    cfg: &PipelineConfig,
    report: &MetricsReport,
    archive: &ModelArchive,
    prepared: &PreparedData,
    fit_rows: usize,
) -> Result<()> {
    let dir = &cfg.out_dir;
    write_atomic(&dir.join("report.csv"), &report.to_csv())?;
    write_atomic(&dir.join("report.txt"), &report.to_text())?;
    save_model(archive, &dir.join("model.json"))?;
    let manifest = Manifest {
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        archive_format_version: ARCHIVE_FORMAT_VERSION,
        seed: cfg.seed,
        config_digest: archive.metadata.config_digest.clone(),
        config: cfg.clone(),
        rows: ManifestRows {
            parsed: prepared.parsed_rows,
            skipped: prepared.skipped,
            train: prepared.train.n_rows(),
            test: prepared.test.n_rows(),
            fit: fit_rows,
        },
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
    write_atomic(&dir.join("manifest.json"), &(json + "\n"))
}

/// Score a saved model against a labeled log. The vocabulary and scaler
/// travel inside the archive, so the input only has to be parseable.
pub fn evaluate_log(archive: &ModelArchive, input: &Path) -> Result<MetricsRow> {
    let parsed = parse_conn_log_file(input).map_err(|e| e.at_stage("parse"))?;
    let records = impute_all(parsed.records);
    let raw = encode(&records, &archive.vocab).map_err(|e| e.at_stage("encode"))?;
    let ds = archive.scaler.apply(&raw).map_err(|e| e.at_stage("scale"))?;
    let probs = archive.model.predict_proba(&ds).map_err(|e| e.at_stage("evaluate"))?;
    let predictions: Vec<ClassLabel> = probs.iter().copied().map(label_from_probs).collect();
    let scores: Vec<f64> = probs.iter().map(|p| p[1]).collect();
    let cm = confusion(ds.labels(), &predictions).map_err(|e| e.at_stage("evaluate"))?;
    let sampling = archive
        .metadata
        .metrics
        .as_ref()
        .map(|m| m.sampling.clone())
        .unwrap_or_else(|| "n/a".to_string());
    Ok(MetricsRow::new(
        archive.model.kind(),
        sampling,
        metrics(&cm).map_err(|e| e.at_stage("evaluate"))?,
        roc_auc(ds.labels(), &scores).map_err(|e| e.at_stage("evaluate"))?,
    ))
}

/// Run the full model x sampling grid. Each combination executes as its
/// own experiment in `out_dir/<model>-<sampling>/`, up to `workers` at a
/// time (0 = one per core); the combined report lands in `out_dir`.
pub fn run_sweep(
    base: &PipelineConfig,
    models: &[ModelChoice],
    samplings: &[SamplingStrategy],
    workers: usize,
) -> Result<MetricsReport> {
    if models.is_empty() || samplings.is_empty() {
        return Err(Error::Config("sweep requires at least one model and one sampling".into()));
    }
    let combos: Vec<(ModelChoice, SamplingStrategy)> = models
        .iter()
        .flat_map(|&m| samplings.iter().map(move |&s| (m, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let rows: Result<Vec<MetricsRow>> = pool.install(|| {
        combos
            .par_iter()
            .map(|&(model, sampling)| {
                let mut cfg = base.clone();
                cfg.model = model;
                cfg.sampling = sampling;
                cfg.out_dir = base.out_dir.join(format!("{model}-{sampling}"));
                run_experiment(&cfg).map(|out| out.row)
            })
            .collect()
    });
    let report = build_report(rows?);
    write_atomic(&base.out_dir.join("report.csv"), &report.to_csv())?;
    write_atomic(&base.out_dir.join("report.txt"), &report.to_text())?;
    Ok(report)
}
