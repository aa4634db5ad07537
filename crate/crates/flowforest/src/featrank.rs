//! Rank-based fusion of feature-importance lists from different models.
//!
//! Raw importances from different learners live on incomparable scales
//! (gain, impurity decrease, accuracy drop), so each method's list is
//! first reduced to dense ranks and only the ranks are averaged.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature: String,
    pub importance: f64,
    /// 1 = most important; dense, no gaps, no shared ranks.
    pub rank: usize,
}

/// One method's features ordered by importance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRanking {
    pub method: String,
    pub entries: Vec<RankedFeature>,
}

impl ImportanceRanking {
    pub fn rank_of(&self, feature: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.feature == feature).map(|e| e.rank)
    }

    /// Rank charged to features this method never scored.
    pub fn absent_penalty(&self) -> usize {
        self.entries.len() + 1
    }
}

/// Sort descending by importance, ties broken by feature name, and
/// assign dense ranks starting at 1.
pub fn rank_importances(
    importances: &BTreeMap<String, f64>,
    method: &str,
) -> Result<ImportanceRanking> {
    if importances.is_empty() {
        return Err(Error::InvalidParameter {
            what: "importances",
            requirement: "non-empty",
            got: "empty map".into(),
        });
    }
    for (name, &value) in importances {
        if !value.is_finite() {
            return Err(Error::NonFiniteImportance { name: name.clone() });
        }
    }
    let mut entries: Vec<(&String, f64)> = importances.iter().map(|(k, &v)| (k, v)).collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));
    Ok(ImportanceRanking {
        method: method.to_string(),
        entries: entries
            .into_iter()
            .enumerate()
            .map(|(i, (feature, importance))| RankedFeature {
                feature: feature.clone(),
                importance,
                rank: i + 1,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedFeature {
    pub feature: String,
    /// Per-method rank, in the order the rankings were given; absent
    /// features carry that method's penalty rank.
    pub method_ranks: Vec<usize>,
    pub mean_rank: f64,
    pub final_rank: usize,
}

/// The fused list, ordered by final rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedRanking {
    pub methods: Vec<String>,
    pub features: Vec<FusedFeature>,
}

/// Average each universe feature's per-method ranks and re-rank by the
/// mean (lower = more important). Mean ties are broken by the second
/// method's rank, then by name.
pub fn fuse_ranks(rankings: &[ImportanceRanking], universe: &[String]) -> Result<FusedRanking> {
    if rankings.len() < 2 {
        return Err(Error::TooFewRankings(rankings.len()));
    }
    if universe.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let mut features: Vec<FusedFeature> = universe
        .iter()
        .map(|feature| {
            let method_ranks: Vec<usize> = rankings
                .iter()
                .map(|r| r.rank_of(feature).unwrap_or_else(|| r.absent_penalty()))
                .collect();
            let mean_rank =
                method_ranks.iter().sum::<usize>() as f64 / method_ranks.len() as f64;
            FusedFeature {
                feature: feature.clone(),
                method_ranks,
                mean_rank,
                final_rank: 0,
            }
        })
        .collect();
    features.sort_by(|a, b| {
        a.mean_rank
            .total_cmp(&b.mean_rank)
            .then(a.method_ranks[1].cmp(&b.method_ranks[1]))
            .then(a.feature.cmp(&b.feature))
    });
    for (i, f) in features.iter_mut().enumerate() {
        f.final_rank = i + 1;
    }
    Ok(FusedRanking {
        methods: rankings.iter().map(|r| r.method.clone()).collect(),
        features,
    })
}

/// The k best features of the fused list, most important first.
pub fn select_top_k(fused: &FusedRanking, k: usize) -> Result<Vec<String>> {
    if k < 1 || k > fused.features.len() {
        return Err(Error::TopKOutOfRange {
            k,
            max: fused.features.len(),
        });
    }
    Ok(fused.features[..k].iter().map(|f| f.feature.clone()).collect())
}

impl FusedRanking {
    /// CSV with one rank column per method plus the fused columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature");
        for m in &self.methods {
            out.push_str(&format!(",rank_{m}"));
        }
        out.push_str(",mean_rank,final_rank\n");
        for f in &self.features {
            out.push_str(&f.feature);
            for r in &f.method_ranks {
                out.push_str(&format!(",{r}"));
            }
            out.push_str(&format!(",{:.5},{}\n", f.mean_rank, f.final_rank));
        }
        out
    }
}

/// Parse `feature,importance` lines. A literal `feature,importance`
/// header is allowed and skipped.
pub fn parse_importance_csv(text: &str, path: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line == "feature,importance") {
            continue;
        }
        let err = |reason: String| Error::ImportanceFile {
            path: path.to_string(),
            line: i + 1,
            reason,
        };
        let (feature, value) = line
            .split_once(',')
            .ok_or_else(|| err("expected feature,importance".into()))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| err(format!("bad importance {value:?}")))?;
        if out.insert(feature.trim().to_string(), value).is_some() {
            return Err(err(format!("duplicate feature {feature:?}")));
        }
    }
    if out.is_empty() {
        return Err(Error::ImportanceFile {
            path: path.to_string(),
            line: 0,
            reason: "no importance rows".into(),
        });
    }
    Ok(out)
}

pub fn read_importance_csv(path: &Path) -> Result<BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_importance_csv(&text, &path.display().to_string())
}
