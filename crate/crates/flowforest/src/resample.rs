//! Class-balance strategies: SMOTE oversampling, ENN cleaning, their
//! composition, and hybrid over/under sampling.
//!
//! Distances are plain Euclidean, so resample scaled features; on raw
//! flows the byte-count columns would dominate every neighbor query.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{class_counts, ClassCounts, ClassLabel, Dataset, RandomSeed};
use crate::error::{Error, Result};

/// Which balancing strategy to run before training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingStrategy {
    #[default]
    None,
    Smote,
    Hybrid,
    Smoteenn,
}

impl fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SamplingStrategy::None => "none",
            SamplingStrategy::Smote => "smote",
            SamplingStrategy::Hybrid => "hybrid",
            SamplingStrategy::Smoteenn => "smoteenn",
        };
        f.write_str(s)
    }
}

impl FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<SamplingStrategy> {
        match s {
            "none" => Ok(SamplingStrategy::None),
            "smote" => Ok(SamplingStrategy::Smote),
            "hybrid" => Ok(SamplingStrategy::Hybrid),
            "smoteenn" => Ok(SamplingStrategy::Smoteenn),
            other => Err(Error::InvalidParameter {
                what: "sampling strategy",
                requirement: "one of none, smote, hybrid, smoteenn",
                got: other.to_string(),
            }),
        }
    }
}

/// Parameters for the resampling stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResampleConfig {
    pub strategy: SamplingStrategy,
    pub smote_k: usize,
    pub enn_k: usize,
    pub hybrid_target: usize,
    pub seed: RandomSeed,
}

impl Default for ResampleConfig {
    fn default() -> ResampleConfig {
        ResampleConfig {
            strategy: SamplingStrategy::None,
            smote_k: 5,
            enn_k: 3,
            hybrid_target: 12_000,
            seed: RandomSeed(0),
        }
    }
}

impl ResampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.smote_k < 1 {
            return Err(Error::InvalidParameter {
                what: "smote_k",
                requirement: "at least 1",
                got: self.smote_k.to_string(),
            });
        }
        if self.enn_k < 1 || self.enn_k % 2 == 0 {
            return Err(Error::InvalidParameter {
                what: "enn_k",
                requirement: "odd and at least 1",
                got: self.enn_k.to_string(),
            });
        }
        if self.hybrid_target < 1 {
            return Err(Error::InvalidParameter {
                what: "hybrid_target",
                requirement: "at least 1",
                got: self.hybrid_target.to_string(),
            });
        }
        Ok(())
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the k nearest rows to `query` among `candidates`, self
/// excluded, ties broken by (distance, index).
fn knn(ds: &Dataset, query: usize, candidates: &[usize], k: usize) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .filter(|&&c| c != query)
        .map(|&c| (sq_dist(ds.row(query), ds.row(c)), c))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    scored.truncate(k);
    scored.into_iter().map(|(_, i)| i).collect()
}

/// Oversample with SMOTE until class counts reach `target`.
///
/// Each synthetic row interpolates a same-class point toward one of its
/// k nearest same-class neighbors: x + u(x_nn - x) with u in [0,1).
/// Original rows come first, synthetics are appended per class.
pub fn smote(ds: &Dataset, target: &ClassCounts, k: usize, seed: RandomSeed) -> Result<Dataset> {
    let counts = class_counts(ds);
    for label in ClassLabel::ALL {
        if target.get(label) < counts.get(label) {
            return Err(Error::TargetBelowCurrent {
                label,
                target: target.get(label),
                current: counts.get(label),
            });
        }
    }

    let mut rows: Vec<Vec<f64>> = ds.rows().map(<[f64]>::to_vec).collect();
    let mut labels = ds.labels().to_vec();

    for label in ClassLabel::ALL {
        let needed = target.get(label) - counts.get(label);
        if needed == 0 {
            continue;
        }
        let members: Vec<usize> = (0..ds.n_rows()).filter(|&i| ds.label(i) == label).collect();
        if members.len() < 2 {
            return Err(Error::NoInterpolationNeighbor { label });
        }
        let k_eff = if k > members.len() - 1 {
            log::warn!(
                "smote_k={} exceeds {:?} class size minus one; clamping to {}",
                k,
                label,
                members.len() - 1
            );
            members.len() - 1
        } else {
            k
        };
        // Neighbor lists are deterministic, so precompute them in parallel
        // and keep the RNG draws in a sequential loop.
        let neighbors: Vec<Vec<usize>> = members
            .par_iter()
            .map(|&m| knn(ds, m, &members, k_eff))
            .collect();
        let mut rng = seed.child(label.code() as u64).rng();
        for _ in 0..needed {
            let base_pos = rng.gen_range(0..members.len());
            let base = ds.row(members[base_pos]);
            let nn = ds.row(neighbors[base_pos][rng.gen_range(0..k_eff)]);
            let u: f64 = rng.gen();
            let synthetic: Vec<f64> =
                base.iter().zip(nn).map(|(x, n)| x + u * (n - x)).collect();
            rows.push(synthetic);
            labels.push(label);
        }
    }

    Dataset::from_rows(rows, labels, ds.feature_names().to_vec())
}

/// Edited-nearest-neighbors cleaning: drop every row whose label loses
/// the majority vote of its k nearest neighbors. Votes are all computed
/// on the input dataset, then removals applied in one pass.
pub fn enn_filter(ds: &Dataset, k: usize) -> Result<Dataset> {
    if ds.n_rows() <= k {
        return Err(Error::TooFewRowsForFilter {
            k,
            rows: ds.n_rows(),
        });
    }
    let all: Vec<usize> = (0..ds.n_rows()).collect();
    let keep: Vec<usize> = all
        .par_iter()
        .filter(|&&i| {
            let disagree = knn(ds, i, &all, k)
                .iter()
                .filter(|&&n| ds.label(n) != ds.label(i))
                .count();
            disagree * 2 <= k
        })
        .copied()
        .collect();
    Ok(ds.select(&keep))
}

/// SMOTE to equal class counts, then ENN over the full result. Either
/// class may lose rows in the cleaning pass, so the output counts are
/// generally unequal again.
pub fn smote_enn(ds: &Dataset, cfg: &ResampleConfig) -> Result<Dataset> {
    cfg.validate()?;
    let counts = class_counts(ds);
    let target = ClassCounts::new(counts.max(), counts.max());
    let balanced = smote(ds, &target, cfg.smote_k, cfg.seed.child(1))?;
    enn_filter(&balanced, cfg.enn_k)
}

/// Oversample the minority class up to `hybrid_target`, then undersample
/// the majority class down to it. Classes already past a threshold are
/// left alone; equal class counts make the whole call an identity.
pub fn hybrid_sample(ds: &Dataset, cfg: &ResampleConfig) -> Result<Dataset> {
    cfg.validate()?;
    let counts = class_counts(ds);
    let Some(minority) = counts.minority() else {
        return Ok(ds.clone());
    };
    let majority = minority.other();

    let oversampled = if counts.get(minority) < cfg.hybrid_target {
        let mut target = counts;
        target.set(minority, cfg.hybrid_target);
        smote(ds, &target, cfg.smote_k, cfg.seed.child(1))?
    } else {
        ds.clone()
    };

    let majority_count = class_counts(&oversampled).get(majority);
    if majority_count <= cfg.hybrid_target {
        return Ok(oversampled);
    }
    let mut majority_rows: Vec<usize> = (0..oversampled.n_rows())
        .filter(|&i| oversampled.label(i) == majority)
        .collect();
    let mut rng = cfg.seed.child(2).rng();
    // Partial Fisher-Yates: the first hybrid_target slots are a uniform
    // draw without replacement.
    for i in 0..cfg.hybrid_target {
        let j = rng.gen_range(i..majority_rows.len());
        majority_rows.swap(i, j);
    }
    majority_rows.truncate(cfg.hybrid_target);

    let mut keep: Vec<usize> = (0..oversampled.n_rows())
        .filter(|&i| oversampled.label(i) == minority)
        .chain(majority_rows)
        .collect();
    keep.sort_unstable();
    Ok(oversampled.select(&keep))
}

/// Dispatch on the configured strategy. `None` returns the input as-is.
pub fn apply(ds: &Dataset, cfg: &ResampleConfig) -> Result<Dataset> {
    cfg.validate()?;
    match cfg.strategy {
        SamplingStrategy::None => Ok(ds.clone()),
        SamplingStrategy::Smote => {
            let counts = class_counts(ds);
            let target = ClassCounts::new(counts.max(), counts.max());
            smote(ds, &target, cfg.smote_k, cfg.seed.child(1))
        }
        SamplingStrategy::Hybrid => hybrid_sample(ds, cfg),
        SamplingStrategy::Smoteenn => smote_enn(ds, cfg),
    }
}
