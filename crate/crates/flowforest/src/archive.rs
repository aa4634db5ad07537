//! Versioned on-disk persistence for trained models.
//!
//! An archive is a single self-describing JSON document carrying the
//! fitted model together with everything needed to score raw flow logs
//! later: the category vocabulary, the robust scaler, and provenance
//! metadata (seed, a digest of the producing config, and the headline
//! metrics). The loader refuses documents whose `format_version` it does
//! not understand, so stale tooling fails loudly instead of misreading.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{DecisionTreeBaseline, LogisticModel};
use crate::cascade::CascadeModel;
use crate::error::{Error, Result};
use crate::ingest::{EncoderVocab, RobustScaler};
use crate::metrics::MetricsRow;
use crate::model::{Classifier, Probs};

pub const ARCHIVE_FORMAT_VERSION: u32 = 1;

/// Any of the trainable model families, tagged for serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum TrainedModel {
    #[serde(rename = "deep-forest")]
    DeepForest(CascadeModel),
    #[serde(rename = "decision-tree")]
    DecisionTree(DecisionTreeBaseline),
    #[serde(rename = "logreg")]
    LogReg(LogisticModel),
}

impl TrainedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            TrainedModel::DeepForest(_) => "deep-forest",
            TrainedModel::DecisionTree(_) => "decision-tree",
            TrainedModel::LogReg(_) => "logreg",
        }
    }
}

impl Classifier for TrainedModel {
    fn predict_proba_row(&self, row: &[f64]) -> Result<Probs> {
        match self {
            TrainedModel::DeepForest(m) => m.predict_proba_row(row),
            TrainedModel::DecisionTree(m) => m.predict_proba_row(row),
            TrainedModel::LogReg(m) => m.predict_proba_row(row),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub seed: u64,
    /// SHA-256 of the producing configuration's JSON form.
    pub config_digest: String,
    /// Test-split scores recorded at training time, if evaluation ran.
    pub metrics: Option<MetricsRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub format_version: u32,
    pub model: TrainedModel,
    pub vocab: EncoderVocab,
    pub scaler: RobustScaler,
    pub metadata: TrainingMetadata,
}

/// Hex SHA-256 of a config's canonical JSON serialization. Struct fields
/// serialize in declaration order, so equal configs digest equally.
pub fn config_digest<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_string(config)
        .map_err(|e| Error::Config(format!("config not serializable: {e}")))?;
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

/// Write via a temporary file in the same directory plus rename, so a
/// crash mid-write never leaves a half-written artifact at `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let mut tmp = path.to_path_buf();
    tmp.set_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut file = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(contents.as_bytes())
        .and_then(|_| file.sync_all())
        .map_err(|e| Error::io(&tmp, e))?;
    drop(file);
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn save_model(archive: &ModelArchive, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(archive)
        .map_err(|e| Error::CorruptArchive(format!("serialization failed: {e}")))?;
    write_atomic(path, &json)
}

pub fn load_model(path: &Path) -> Result<ModelArchive> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    // Check the version before attempting the full decode, so a format
    // bump reports itself rather than as a shape mismatch.
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::CorruptArchive(format!("{}: {e}", path.display())))?;
    let version = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| {
            Error::CorruptArchive(format!("{}: missing format_version", path.display()))
        })?;
    if version != ARCHIVE_FORMAT_VERSION as u64 {
        return Err(Error::UnsupportedArchiveVersion {
            got: version,
            expected: ARCHIVE_FORMAT_VERSION as u64,
        });
    }
    serde_json::from_value(value)
        .map_err(|e| Error::CorruptArchive(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{decision_tree_params, LogRegConfig};
    use crate::cascade::CascadeConfig;
    use crate::data::{ClassLabel, Dataset, RandomSeed};
    use crate::ingest::{impute_all, parse_conn_log, EncoderVocab};

    fn toy_dataset(n: usize, seed: u64) -> Dataset {
        use rand::Rng;
        let mut rng = RandomSeed(seed).rng();
        let mut rows = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let malicious = rng.gen_bool(0.5);
            let center = if malicious { 1.5 } else { -1.5 };
            rows.push(vec![
                center + rng.gen_range(-1.0..1.0),
                center + rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ]);
            labels.push(if malicious {
                ClassLabel::Malicious
            } else {
                ClassLabel::Benign
            });
        }
        Dataset::from_rows_unnamed(rows, labels).unwrap()
    }

    fn toy_vocab() -> EncoderVocab {
        let log = "#fields\tts\tid.orig_h\tid.orig_p\tid.resp_h\tid.resp_p\tproto\tservice\tduration\torig_bytes\tresp_bytes\tconn_state\tmissed_bytes\thistory\torig_pkts\torig_ip_bytes\tresp_pkts\tresp_ip_bytes\tlabel\n\
               1.0\t10.0.0.1\t1024\t10.0.0.2\t80\ttcp\thttp\t0.5\t10\t20\tSF\t0\tD\t1\t50\t1\t60\tBenign\n";
        let parsed = parse_conn_log(log.as_bytes()).unwrap();
        EncoderVocab::fit(&impute_all(parsed.records))
    }

    fn toy_archive(seed: u64) -> ModelArchive {
        let ds = toy_dataset(60, seed);
        let tree =
            DecisionTreeBaseline::fit(&ds, &decision_tree_params(), RandomSeed(seed)).unwrap();
        let vocab = toy_vocab();
        let scaler = RobustScaler::fit(&ds).unwrap();
        ModelArchive {
            format_version: ARCHIVE_FORMAT_VERSION,
            model: TrainedModel::DecisionTree(tree),
            vocab,
            scaler,
            metadata: TrainingMetadata {
                seed,
                config_digest: config_digest(&decision_tree_params()).unwrap(),
                metrics: None,
            },
        }
    }

    #[test]
    fn round_trip_predicts_identically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let archive = toy_archive(7);
        save_model(&archive, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded, archive);
        let probe = toy_dataset(100, 99);
        assert_eq!(
            loaded.model.predict_proba(&probe).unwrap(),
            archive.model.predict_proba(&probe).unwrap()
        );
    }

    #[test]
    fn cascade_model_round_trips() {
        let train = toy_dataset(40, 3);
        let valid = toy_dataset(20, 4);
        let cfg = CascadeConfig {
            max_layers: 2,
            n_cascade_rf: 1,
            trees_per_forest: 5,
            cv_folds: 2,
            max_depth: Some(4),
            seed: RandomSeed(5),
            ..CascadeConfig::default()
        };
        let model = CascadeModel::fit(&train, &valid, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cascade.json");
        let mut archive = toy_archive(7);
        archive.model = TrainedModel::DeepForest(model);
        save_model(&archive, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        let probe = toy_dataset(30, 11);
        assert_eq!(
            loaded.model.predict_proba(&probe).unwrap(),
            archive.model.predict_proba(&probe).unwrap()
        );
        assert_eq!(loaded.model.kind(), "deep-forest");
    }

    #[test]
    fn logreg_model_round_trips() {
        let ds = toy_dataset(50, 8);
        let model = LogisticModel::fit(&ds, &LogRegConfig::default(), RandomSeed(0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lr.json");
        let mut archive = toy_archive(1);
        archive.model = TrainedModel::LogReg(model);
        save_model(&archive, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), archive);
    }

    #[test]
    fn unknown_version_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&toy_archive(7), &path).unwrap();
        let mut value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        value["format_version"] = serde_json::json!(99);
        std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::UnsupportedArchiveVersion { got: 99, expected: 1 })
        ));
    }

    #[test]
    fn truncated_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&toy_archive(7), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(load_model(&path), Err(Error::CorruptArchive(_))));
    }

    #[test]
    fn missing_version_field_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        std::fs::write(&path, "{\"model\": null}").unwrap();
        let err = load_model(&path).unwrap_err();
        assert!(matches!(err, Error::CorruptArchive(ref m) if m.contains("format_version")));
    }

    #[test]
    fn digest_is_stable_and_config_sensitive() {
        let a = config_digest(&LogRegConfig::default()).unwrap();
        let b = config_digest(&LogRegConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
        let other = LogRegConfig {
            l2_lambda: 2.0,
            ..LogRegConfig::default()
        };
        assert_ne!(a, config_digest(&other).unwrap());
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, "hello").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "hello");
        let names: Vec<String> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, ["out.txt"]);
    }

    #[test]
    fn atomic_write_creates_parent_dirs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/out.txt");
        write_atomic(&path, "x").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x");
    }
}
