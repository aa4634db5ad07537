//! Comparison models: a pruned single decision tree and L2 logistic
//! regression.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, RandomSeed};
use crate::error::{Error, Result};
use crate::model::{Classifier, Probs};
use crate::tree::{DecisionTree, SplitMode, TreeParams};

/// Stock decision-tree hyperparameters: shallow and pruned, a deliberate
/// weak-but-stable reference point.
pub fn decision_tree_params() -> TreeParams {
    TreeParams {
        max_depth: Some(4),
        min_samples_split: 10,
        ccp_alpha: 0.01,
        split_mode: SplitMode::Exhaustive,
        features_per_split: None,
    }
}

/// Single CART tree fitted with [`decision_tree_params`] (or overrides)
/// and cost-complexity pruned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeBaseline {
    pub tree: DecisionTree,
    pub params: TreeParams,
}

impl DecisionTreeBaseline {
    pub fn fit(ds: &Dataset, params: &TreeParams, seed: RandomSeed) -> Result<DecisionTreeBaseline> {
        let tree = DecisionTree::fit(ds, params, seed)?;
        let tree = if params.ccp_alpha > 0.0 {
            tree.ccp_prune(params.ccp_alpha)
        } else {
            tree
        };
        Ok(DecisionTreeBaseline {
            tree,
            params: *params,
        })
    }
}

impl Classifier for DecisionTreeBaseline {
    fn predict_proba_row(&self, row: &[f64]) -> Result<Probs> {
        self.tree.predict_proba_row(row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegConfig {
    pub l2_lambda: f64,
    pub max_iter: usize,
}

impl Default for LogRegConfig {
    fn default() -> LogRegConfig {
        LogRegConfig {
            l2_lambda: 1.0,
            max_iter: 1000,
        }
    }
}

/// L2-regularized logistic regression fitted by batch gradient descent
/// with backtracking line search. Works on scaled features; raw flow
/// columns span orders of magnitude and stall the line search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2_lambda: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean log-loss plus the ridge penalty (bias unpenalized).
pub fn loss(ds: &Dataset, weights: &[f64], bias: f64, lambda: f64) -> f64 {
    let n = ds.n_rows() as f64;
    let data_loss: f64 = (0..ds.n_rows())
        .into_par_iter()
        .map(|i| {
            let z: f64 = ds.row(i).iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() + bias;
            let y = ds.label(i).code() as f64;
            // log(1+e^-|z|) form avoids overflow for large |z|
            let log1pexp = if z > 0.0 {
                (-z).exp().ln_1p()
            } else {
                -z + z.exp().ln_1p()
            };
            (1.0 - y) * z + log1pexp
        })
        .sum::<f64>()
        / n;
    let penalty: f64 = lambda * weights.iter().map(|w| w * w).sum::<f64>() / 2.0;
    data_loss + penalty
}

/// Gradient of [`loss`]; the last component is the bias derivative.
pub fn gradient(ds: &Dataset, weights: &[f64], bias: f64, lambda: f64) -> Vec<f64> {
    let d = ds.n_features();
    let n = ds.n_rows() as f64;
    let mut grad = (0..ds.n_rows())
        .into_par_iter()
        .fold(
            || vec![0.0; d + 1],
            |mut acc, i| {
                let row = ds.row(i);
                let z: f64 = row.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() + bias;
                let err = sigmoid(z) - ds.label(i).code() as f64;
                for (a, x) in acc.iter_mut().zip(row) {
                    *a += err * x;
                }
                acc[d] += err;
                acc
            },
        )
        .reduce(
            || vec![0.0; d + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );
    for g in grad.iter_mut() {
        *g /= n;
    }
    for (g, w) in grad.iter_mut().zip(weights) {
        *g += lambda * w;
    }
    grad
}

const GRAD_TOL: f64 = 1e-6;

impl LogisticModel {
    /// The seed is accepted for interface symmetry; the optimizer itself
    /// is deterministic from the zero start.
    pub fn fit(ds: &Dataset, cfg: &LogRegConfig, _seed: RandomSeed) -> Result<LogisticModel> {
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !(cfg.l2_lambda >= 0.0) {
            return Err(Error::InvalidParameter {
                what: "l2_lambda",
                requirement: "non-negative",
                got: cfg.l2_lambda.to_string(),
            });
        }
        let d = ds.n_features();
        let mut weights = vec![0.0; d];
        let mut bias = 0.0;
        let mut current = loss(ds, &weights, bias, cfg.l2_lambda);
        for _ in 0..cfg.max_iter {
            let grad = gradient(ds, &weights, bias, cfg.l2_lambda);
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm < GRAD_TOL {
                break;
            }
            // Backtracking with the Armijo condition; never accept a step
            // that fails to decrease the loss.
            let mut step = 1.0;
            let sq_norm = norm * norm;
            let mut accepted = false;
            for _ in 0..50 {
                let trial_w: Vec<f64> = weights
                    .iter()
                    .zip(&grad)
                    .map(|(w, g)| w - step * g)
                    .collect();
                let trial_b = bias - step * grad[d];
                let trial = loss(ds, &trial_w, trial_b, cfg.l2_lambda);
                if trial <= current - 1e-4 * step * sq_norm {
                    weights = trial_w;
                    bias = trial_b;
                    current = trial;
                    accepted = true;
                    break;
                }
                step /= 2.0;
            }
            if !accepted {
                break;
            }
        }
        Ok(LogisticModel {
            weights,
            bias,
            l2_lambda: cfg.l2_lambda,
        })
    }
}

impl Classifier for LogisticModel {
    fn predict_proba_row(&self, row: &[f64]) -> Result<Probs> {
        if row.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: row.len(),
            });
        }
        let z: f64 = row.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>() + self.bias;
        let p1 = sigmoid(z);
        Ok([1.0 - p1, p1])
    }
}
