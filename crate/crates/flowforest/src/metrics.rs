//! Confusion-matrix metrics and rank-based ROC AUC.
//!
//! Malicious flows are the positive class: a false negative is an attack
//! that slipped through, so recall tracks detection coverage.

use serde::{Deserialize, Serialize};

use crate::data::ClassLabel;
use crate::error::{Error, Result};

/// Binary confusion matrix. Positive class = malicious.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positives: usize,
    pub true_negatives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_positives + self.true_negatives + self.false_positives + self.false_negatives
    }
}

/// Tally the four confusion cells.
pub fn confusion(labels: &[ClassLabel], predictions: &[ClassLabel]) -> Result<ConfusionMatrix> {
    if labels.len() != predictions.len() {
        return Err(Error::PredictionLengthMismatch {
            labels: labels.len(),
            predictions: predictions.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&truth, &pred) in labels.iter().zip(predictions) {
        match (truth, pred) {
            (ClassLabel::Malicious, ClassLabel::Malicious) => cm.true_positives += 1,
            (ClassLabel::Benign, ClassLabel::Benign) => cm.true_negatives += 1,
            (ClassLabel::Benign, ClassLabel::Malicious) => cm.false_positives += 1,
            (ClassLabel::Malicious, ClassLabel::Benign) => cm.false_negatives += 1,
        }
    }
    Ok(cm)
}

/// Accuracy, precision, recall, and F1 derived from one confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricScores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Compute the four scores. Zero-denominator cells yield 0 with a warning
/// so degenerate predictors still produce a full report.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricScores> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyConfusionMatrix);
    }
    let tp = cm.true_positives as f64;
    let tn = cm.true_negatives as f64;
    let fp = cm.false_positives as f64;
    let fn_ = cm.false_negatives as f64;

    let accuracy = (tp + tn) / (tp + tn + fp + fn_);
    let precision = if tp + fp == 0.0 {
        log::warn!("no predicted positives; precision reported as 0");
        0.0
    } else {
        tp / (tp + fp)
    };
    let recall = if tp + fn_ == 0.0 {
        log::warn!("no positive labels; recall reported as 0");
        0.0
    } else {
        tp / (tp + fn_)
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(MetricScores {
        accuracy,
        precision,
        recall,
        f1,
    })
}

/// Rank-based ROC AUC (the normalized Mann-Whitney statistic): concordant
/// pairs count 1, ties count 1/2, computed via rank sums with average
/// ranks for tied scores.
pub fn roc_auc(labels: &[ClassLabel], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::PredictionLengthMismatch {
            labels: labels.len(),
            predictions: scores.len(),
        });
    }
    let positives = labels.iter().filter(|l| **l == ClassLabel::Malicious).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClassAuc);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Average ranks over tied score groups, 1-based.
    let mut ranks = vec![0.0f64; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }

    let positive_rank_sum: f64 = labels
        .iter()
        .zip(&ranks)
        .filter(|(l, _)| **l == ClassLabel::Malicious)
        .map(|(_, r)| r)
        .sum();
    let p = positives as f64;
    let n = negatives as f64;
    let u = positive_rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * n))
}

/// One report line: a (model, sampling) configuration and its scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub model: String,
    pub sampling: String,
    pub accuracy: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub roc_auc: f64,
}

impl MetricsRow {
    pub fn new(
        model: impl Into<String>,
        sampling: impl Into<String>,
        scores: MetricScores,
        roc_auc: f64,
    ) -> MetricsRow {
        MetricsRow {
            model: model.into(),
            sampling: sampling.into(),
            accuracy: scores.accuracy,
            f1: scores.f1,
            precision: scores.precision,
            recall: scores.recall,
            roc_auc,
        }
    }
}

/// Rows grouped by model and ordered by ROC AUC within each group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rows: Vec<MetricsRow>,
}

const REPORT_COLUMNS: &str = "model,sampling,accuracy,f1,precision,recall,roc_auc";

/// Assemble the report: rows grouped by model in order of first
/// appearance, sorted by ROC AUC descending within each model.
pub fn build_report(rows: Vec<MetricsRow>) -> MetricsReport {
    let mut model_order: Vec<String> = Vec::new();
    for row in &rows {
        if !model_order.contains(&row.model) {
            model_order.push(row.model.clone());
        }
    }
    let mut ordered = Vec::with_capacity(rows.len());
    for model in &model_order {
        let mut group: Vec<MetricsRow> =
            rows.iter().filter(|r| &r.model == model).cloned().collect();
        group.sort_by(|a, b| b.roc_auc.total_cmp(&a.roc_auc));
        ordered.extend(group);
    }
    MetricsReport { rows: ordered }
}

impl MetricsReport {
    /// CSV rendering with a fixed five-decimal format.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_COLUMNS);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.5},{:.5},{:.5},{:.5},{:.5}\n",
                r.model, r.sampling, r.accuracy, r.f1, r.precision, r.recall, r.roc_auc
            ));
        }
        out
    }

    /// Fixed-width text rendering of the same rows.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<16} {:<10} {:>9} {:>9} {:>9} {:>9} {:>9}\n",
            "model", "sampling", "accuracy", "f1", "precision", "recall", "roc_auc"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<16} {:<10} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5}\n",
                r.model, r.sampling, r.accuracy, r.f1, r.precision, r.recall, r.roc_auc
            ));
        }
        out
    }

    /// Parse rows back from the CSV produced by [`MetricsReport::to_csv`].
    pub fn from_csv(text: &str) -> Result<Vec<MetricsRow>> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                if line != REPORT_COLUMNS {
                    return Err(Error::Config(format!("unexpected report header {line:?}")));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 7 {
                return Err(Error::Config(format!("bad report line {}", i + 1)));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number {s:?} on line {}", i + 1)))
            };
            rows.push(MetricsRow {
                model: parts[0].to_string(),
                sampling: parts[1].to_string(),
                accuracy: num(parts[2])?,
                f1: num(parts[3])?,
                precision: num(parts[4])?,
                recall: num(parts[5])?,
                roc_auc: num(parts[6])?,
            });
        }
        Ok(rows)
    }
}
