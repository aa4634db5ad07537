//! Bagged tree ensembles: random forests and completely-random forests.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, RandomSeed};
use crate::error::{Error, Result};
use crate::model::{label_from_probs, Classifier, Probs};
use crate::tree::{DecisionTree, SplitMode, TreeParams};

/// Ensemble flavor. Random forests pick the best split within a random
/// feature subset; completely-random forests split blindly, which keeps
/// their trees diverse and cheap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForestMode {
    Random,
    CompletelyRandom,
}

impl ForestMode {
    fn split_mode(self) -> SplitMode {
        match self {
            ForestMode::Random => SplitMode::RandomSubspace,
            ForestMode::CompletelyRandom => SplitMode::FullyRandom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub mode: ForestMode,
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub ccp_alpha: f64,
    /// Candidate features per split for [`ForestMode::Random`];
    /// `None` means ceil(sqrt(d)).
    pub features_per_split: Option<usize>,
    /// Score each tree on its out-of-bag rows after fitting.
    pub compute_oob: bool,
}

impl Default for ForestConfig {
    fn default() -> ForestConfig {
        ForestConfig {
            mode: ForestMode::Random,
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            ccp_alpha: 0.0,
            features_per_split: None,
            compute_oob: false,
        }
    }
}

impl ForestConfig {
    fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            ccp_alpha: self.ccp_alpha,
            split_mode: self.mode.split_mode(),
            features_per_split: self.features_per_split,
        }
    }
}

/// A fitted ensemble. Prediction is the arithmetic mean of the member
/// trees' probability vectors, so tree order never matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub mode: ForestMode,
    pub oob_accuracy: Option<f64>,
    pub n_features: usize,
}

impl Forest {
    /// Fit `n_trees` trees, each on its own bootstrap resample. Tree t
    /// derives its seed from `seed.child(t)`, so results are identical
    /// however the trees get scheduled across threads.
    pub fn fit(ds: &Dataset, cfg: &ForestConfig, seed: RandomSeed) -> Result<Forest> {
        if cfg.n_trees < 1 {
            return Err(Error::InvalidParameter {
                what: "n_trees",
                requirement: "at least 1",
                got: cfg.n_trees.to_string(),
            });
        }
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let params = cfg.tree_params();
        params.validate()?;
        let n = ds.n_rows();
        let fits: Vec<(DecisionTree, Vec<bool>)> = (0..cfg.n_trees)
            .into_par_iter()
            .map(|t| {
                let tree_seed = seed.child(t as u64);
                let mut rng = tree_seed.rng();
                let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                let mut in_bag = vec![false; n];
                for &i in &indices {
                    in_bag[i] = true;
                }
                let tree = DecisionTree::fit(&ds.select(&indices), &params, tree_seed.child(1))?;
                let tree = if params.ccp_alpha > 0.0 {
                    tree.ccp_prune(params.ccp_alpha)
                } else {
                    tree
                };
                Ok((tree, in_bag))
            })
            .collect::<Result<Vec<_>>>()?;

        let oob_accuracy = if cfg.compute_oob {
            oob_accuracy(ds, &fits)
        } else {
            None
        };
        Ok(Forest {
            trees: fits.into_iter().map(|(t, _)| t).collect(),
            mode: cfg.mode,
            oob_accuracy,
            n_features: ds.n_features(),
        })
    }

    /// Total Gini decrease credited to each feature across all trees,
    /// normalized to sum 1. All zeros if no tree ever split.
    pub fn impurity_importance(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.n_features];
        for tree in &self.trees {
            let root_n = tree.nodes[0].n as f64;
            for node in &tree.nodes {
                if let Some(split) = node.split {
                    let l = &tree.nodes[split.left];
                    let r = &tree.nodes[split.right];
                    let decrease = (node.n as f64 * node.impurity
                        - l.n as f64 * l.impurity
                        - r.n as f64 * r.impurity)
                        / root_n;
                    total[split.feature] += decrease;
                }
            }
        }
        let sum: f64 = total.iter().sum();
        if sum > 0.0 {
            for v in &mut total {
                *v /= sum;
            }
        } else {
            log::warn!("no splits in any tree; impurity importances are all zero");
        }
        total
    }
}

/// Accuracy over rows scored only by trees whose bootstrap missed them.
fn oob_accuracy(ds: &Dataset, fits: &[(DecisionTree, Vec<bool>)]) -> Option<f64> {
    let scored: Vec<Option<bool>> = (0..ds.n_rows())
        .into_par_iter()
        .map(|i| {
            let mut sum = [0.0; 2];
            let mut voters = 0;
            for (tree, in_bag) in fits {
                if !in_bag[i] {
                    let p = tree
                        .predict_proba_row(ds.row(i))
                        .expect("tree and dataset widths agree");
                    sum[0] += p[0];
                    sum[1] += p[1];
                    voters += 1;
                }
            }
            if voters == 0 {
                return None;
            }
            let probs = [sum[0] / voters as f64, sum[1] / voters as f64];
            Some(label_from_probs(probs) == ds.label(i))
        })
        .collect();
    let evaluated = scored.iter().flatten().count();
    if evaluated == 0 {
        log::warn!("every row was in every bootstrap; no out-of-bag estimate");
        return None;
    }
    let correct = scored.iter().flatten().filter(|c| **c).count();
    Some(correct as f64 / evaluated as f64)
}

impl Classifier for Forest {
    fn predict_proba_row(&self, row: &[f64]) -> Result<Probs> {
        let mut sum = [0.0f64; 2];
        for tree in &self.trees {
            let p = tree.predict_proba_row(row)?;
            sum[0] += p[0];
            sum[1] += p[1];
        }
        let k = self.trees.len() as f64;
        Ok([sum[0] / k, sum[1] / k])
    }

    fn predict_proba(&self, ds: &Dataset) -> Result<Vec<Probs>> {
        (0..ds.n_rows())
            .into_par_iter()
            .map(|i| self.predict_proba_row(ds.row(i)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ClassLabel;
    use crate::tree::Node;

    fn separable(n_per_class: usize) -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut rng = RandomSeed(1234).rng();
        for _ in 0..n_per_class {
            rows.push(vec![rng.gen::<f64>(), rng.gen::<f64>()]);
            labels.push(ClassLabel::Benign);
            rows.push(vec![rng.gen::<f64>() + 3.0, rng.gen::<f64>() + 3.0]);
            labels.push(ClassLabel::Malicious);
        }
        Dataset::from_rows_unnamed(rows, labels).unwrap()
    }

    fn leaf_tree(probs: Probs) -> DecisionTree {
        DecisionTree {
            nodes: vec![Node {
                n: 1,
                impurity: 0.0,
                probs,
                split: None,
            }],
            n_features: 1,
        }
    }

    fn stub_forest(probs: &[Probs]) -> Forest {
        Forest {
            trees: probs.iter().map(|&p| leaf_tree(p)).collect(),
            mode: ForestMode::Random,
            oob_accuracy: None,
            n_features: 1,
        }
    }

    #[test]
    fn singleton_forest_equals_its_tree() {
        let ds = separable(20);
        let cfg = ForestConfig {
            n_trees: 1,
            ..ForestConfig::default()
        };
        let forest = Forest::fit(&ds, &cfg, RandomSeed(3)).unwrap();
        for row in ds.rows() {
            assert_eq!(
                forest.predict_proba_row(row).unwrap(),
                forest.trees[0].predict_proba_row(row).unwrap()
            );
        }
    }

    #[test]
    fn unanimous_trees_carry_through() {
        let f = stub_forest(&[[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(f.predict_proba_row(&[0.0]).unwrap(), [1.0, 0.0]);
    }

    #[test]
    fn mean_of_three_votes() {
        let f = stub_forest(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]);
        let p = f.predict_proba_row(&[0.0]).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let ds = separable(30);
        for mode in [ForestMode::Random, ForestMode::CompletelyRandom] {
            let cfg = ForestConfig {
                mode,
                n_trees: 15,
                ..ForestConfig::default()
            };
            let forest = Forest::fit(&ds, &cfg, RandomSeed(8)).unwrap();
            for p in forest.predict_proba(&ds).unwrap() {
                assert!((p[0] + p[1] - 1.0).abs() < 1e-9);
                assert!(p[0] >= 0.0 && p[1] >= 0.0);
            }
        }
    }

    #[test]
    fn tree_order_does_not_change_predictions() {
        let ds = separable(25);
        let cfg = ForestConfig {
            n_trees: 7,
            ..ForestConfig::default()
        };
        let forest = Forest::fit(&ds, &cfg, RandomSeed(5)).unwrap();
        let mut rotated = forest.clone();
        rotated.trees.rotate_left(3);
        let a = forest.predict_proba(&ds).unwrap();
        let b = rotated.predict_proba(&ds).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x[0] - y[0]).abs() < 1e-12);
            assert!((x[1] - y[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let ds = separable(25);
        let cfg = ForestConfig {
            n_trees: 10,
            mode: ForestMode::CompletelyRandom,
            compute_oob: true,
            ..ForestConfig::default()
        };
        let a = Forest::fit(&ds, &cfg, RandomSeed(5)).unwrap();
        let b = Forest::fit(&ds, &cfg, RandomSeed(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oob_accuracy_present_and_high_on_separable_data() {
        let ds = separable(50);
        let cfg = ForestConfig {
            n_trees: 20,
            compute_oob: true,
            ..ForestConfig::default()
        };
        let forest = Forest::fit(&ds, &cfg, RandomSeed(2)).unwrap();
        let oob = forest.oob_accuracy.unwrap();
        assert!(oob > 0.9, "oob accuracy {oob}");
    }

    #[test]
    fn oob_skipped_when_disabled() {
        let ds = separable(10);
        let forest = Forest::fit(&ds, &ForestConfig::default(), RandomSeed(2)).unwrap();
        assert!(forest.oob_accuracy.is_none());
    }

    #[test]
    fn predicts_separable_data_correctly() {
        let ds = separable(40);
        for mode in [ForestMode::Random, ForestMode::CompletelyRandom] {
            let cfg = ForestConfig {
                mode,
                n_trees: 20,
                ..ForestConfig::default()
            };
            let forest = Forest::fit(&ds, &cfg, RandomSeed(6)).unwrap();
            assert_eq!(forest.predict(&ds).unwrap(), ds.labels());
        }
    }

    #[test]
    fn zero_trees_rejected() {
        let ds = separable(5);
        let cfg = ForestConfig {
            n_trees: 0,
            ..ForestConfig::default()
        };
        assert!(Forest::fit(&ds, &cfg, RandomSeed(0)).is_err());
    }

    #[test]
    fn importance_of_single_split_feature_is_one() {
        // feature 1 is constant, every split must use feature 0
        let ds = Dataset::from_rows_unnamed(
            vec![vec![-1.0, 5.0], vec![-2.0, 5.0], vec![1.0, 5.0], vec![2.0, 5.0]],
            vec![
                ClassLabel::Benign,
                ClassLabel::Benign,
                ClassLabel::Malicious,
                ClassLabel::Malicious,
            ],
        )
        .unwrap();
        let cfg = ForestConfig {
            n_trees: 10,
            ..ForestConfig::default()
        };
        let forest = Forest::fit(&ds, &cfg, RandomSeed(4)).unwrap();
        let imp = forest.impurity_importance();
        assert!((imp[0] - 1.0).abs() < 1e-12);
        assert_eq!(imp[1], 0.0);
    }

    #[test]
    fn importance_all_zero_for_stumps() {
        let ds = separable(10);
        let cfg = ForestConfig {
            n_trees: 3,
            max_depth: Some(0),
            ..ForestConfig::default()
        };
        let forest = Forest::fit(&ds, &cfg, RandomSeed(4)).unwrap();
        assert_eq!(forest.impurity_importance(), vec![0.0, 0.0]);
    }
}
