//! The cascade forest: layers of random and completely-random forests
//! whose class vectors augment the input features of the next layer.
//!
//! Two design points matter for correctness. First, the augmentation
//! vector of a training row always comes from a cross-fitting fold model
//! that never saw that row; reusing in-fold predictions would leak labels
//! into the next layer and overfit the cascade within two layers. Second,
//! growth is governed by validation accuracy with patience, so the layer
//! cap is exactly that, a cap.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, RandomSeed};
use crate::error::{Error, Result};
use crate::forest::{Forest, ForestConfig, ForestMode};
use crate::model::{label_from_probs, Classifier, Probs};
use crate::scan::Scanner;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CascadeConfig {
    /// Hard cap on grown layers.
    pub max_layers: usize,
    /// Forests per type per layer: a layer holds this many random
    /// forests plus as many completely-random ones.
    pub n_cascade_rf: usize,
    pub trees_per_forest: usize,
    pub cv_folds: usize,
    pub early_stop_patience: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub seed: RandomSeed,
}

impl Default for CascadeConfig {
    fn default() -> CascadeConfig {
        CascadeConfig {
            max_layers: 8,
            n_cascade_rf: 8,
            trees_per_forest: 100,
            cv_folds: 3,
            early_stop_patience: 1,
            max_depth: None,
            min_samples_split: 2,
            seed: RandomSeed(0),
        }
    }
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, usize, usize); 5] = [
            ("max_layers", self.max_layers, 1),
            ("n_cascade_rf", self.n_cascade_rf, 1),
            ("trees_per_forest", self.trees_per_forest, 1),
            ("cv_folds", self.cv_folds, 2),
            ("early_stop_patience", self.early_stop_patience, 1),
        ];
        for (what, got, min) in checks {
            if got < min {
                return Err(Error::InvalidParameter {
                    what,
                    requirement: if min == 1 { "at least 1" } else { "at least 2" },
                    got: got.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Forest settings for slot `position` in a layer: the first
    /// `n_cascade_rf` slots are random forests, the rest completely
    /// random.
    pub fn forest_config(&self, position: usize) -> ForestConfig {
        ForestConfig {
            mode: if position < self.n_cascade_rf {
                ForestMode::Random
            } else {
                ForestMode::CompletelyRandom
            },
            n_trees: self.trees_per_forest,
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            ccp_alpha: 0.0,
            features_per_split: None,
            compute_oob: false,
        }
    }
}

/// Improvement tracker: growth continues while the metric keeps setting
/// new strict maxima, and stops once it has gone `patience` consecutive
/// observations without one.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    best_index: usize,
    stale: usize,
    seen: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> EarlyStopping {
        EarlyStopping {
            patience,
            best: f64::NEG_INFINITY,
            best_index: 0,
            stale: 0,
            seen: 0,
        }
    }

    /// Record one observation; returns whether to keep growing.
    pub fn observe(&mut self, value: f64) -> bool {
        self.seen += 1;
        if value > self.best {
            self.best = value;
            self.best_index = self.seen;
            self.stale = 0;
            true
        } else {
            self.stale += 1;
            self.stale < self.patience
        }
    }

    /// 1-based index of the best observation so far (0 before any).
    pub fn best_index(&self) -> usize {
        self.best_index
    }

    pub fn best_value(&self) -> f64 {
        self.best
    }
}

/// Deterministic fold labels: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n_rows: usize, cv_folds: usize, seed: RandomSeed) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n_rows).collect();
    order.shuffle(&mut seed.rng());
    let mut folds = vec![0; n_rows];
    for (pos, &row) in order.iter().enumerate() {
        folds[row] = pos % cv_folds;
    }
    folds
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeLayer {
    /// `n_cascade_rf` random forests followed by as many
    /// completely-random ones.
    pub forests: Vec<Forest>,
}

/// Cross-fitting bookkeeping for one layer, kept for diagnostics and for
/// proving augmentation provenance in tests.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace {
    pub fold_assignment: Vec<usize>,
    /// Cross-fitted augmentation, one row per training row, flattened
    /// forest-major then class.
    pub augmentation: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CascadeTrace {
    pub layers: Vec<LayerTrace>,
}

/// A fitted cascade. Inference propagates through the first
/// `best_layer` layers only; later layers were grown but did not improve
/// validation accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeModel {
    pub layers: Vec<CascadeLayer>,
    pub base_dim: usize,
    pub n_cascade_rf: usize,
    /// 1-based index of the layer used for prediction.
    pub best_layer: usize,
    pub validation_accuracy: Vec<f64>,
    pub scanner: Option<Scanner>,
}

/// Base features plus one flattened augmentation row per input row.
fn augmented(base: &Dataset, aug: Option<&[Vec<f64>]>) -> Result<Dataset> {
    let Some(aug) = aug else {
        return Ok(base.clone());
    };
    let mut names = base.feature_names().to_vec();
    for j in 0..aug[0].len() / 2 {
        for c in 0..2 {
            names.push(format!("cascade_f{j}_c{c}"));
        }
    }
    let rows = (0..base.n_rows())
        .map(|i| {
            let mut row = base.row(i).to_vec();
            row.extend_from_slice(&aug[i]);
            row
        })
        .collect();
    Dataset::from_rows(rows, base.labels().to_vec(), names)
}

fn flatten_probs(per_forest: &[Vec<Probs>], n_rows: usize) -> Vec<Vec<f64>> {
    (0..n_rows)
        .map(|i| {
            per_forest
                .iter()
                .flat_map(|probs| probs[i])
                .collect::<Vec<f64>>()
        })
        .collect()
}

fn mean_probs(per_forest: &[Vec<Probs>], row: usize) -> Probs {
    let k = per_forest.len() as f64;
    let mut sum = [0.0; 2];
    for probs in per_forest {
        sum[0] += probs[row][0];
        sum[1] += probs[row][1];
    }
    [sum[0] / k, sum[1] / k]
}

impl CascadeModel {
    pub fn fit(train: &Dataset, valid: &Dataset, cfg: &CascadeConfig) -> Result<CascadeModel> {
        Ok(CascadeModel::fit_traced(train, valid, cfg)?.0)
    }

    /// Fit after re-representing both splits with an already-fitted
    /// scanner; the scanner then travels with the model so raw rows can
    /// be scored directly.
    pub fn fit_with_scanner(
        train: &Dataset,
        valid: &Dataset,
        cfg: &CascadeConfig,
        scanner: Scanner,
    ) -> Result<CascadeModel> {
        let train = scanner.transform(train)?;
        let valid = scanner.transform(valid)?;
        let mut model = CascadeModel::fit(&train, &valid, cfg)?;
        model.scanner = Some(scanner);
        Ok(model)
    }

    /// [`CascadeModel::fit`] plus per-layer fold assignments and
    /// cross-fitted augmentation matrices.
    pub fn fit_traced(
        train: &Dataset,
        valid: &Dataset,
        cfg: &CascadeConfig,
    ) -> Result<(CascadeModel, CascadeTrace)> {
        cfg.validate()?;
        if train.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if train.n_features() != valid.n_features() {
            return Err(Error::DimensionMismatch {
                expected: train.n_features(),
                got: valid.n_features(),
            });
        }
        let valid_classes = valid
            .labels()
            .iter()
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        if valid_classes < 2 {
            return Err(Error::DegenerateValidation);
        }
        if train.n_rows() < cfg.cv_folds {
            return Err(Error::InvalidParameter {
                what: "cv_folds",
                requirement: "at most the number of training rows",
                got: cfg.cv_folds.to_string(),
            });
        }

        let n = train.n_rows();
        let mut train_aug: Option<Vec<Vec<f64>>> = None;
        let mut valid_aug: Option<Vec<Vec<f64>>> = None;
        let mut stopper = EarlyStopping::new(cfg.early_stop_patience);
        let mut layers = Vec::new();
        let mut trace = CascadeTrace::default();
        let mut validation_accuracy = Vec::new();

        for layer_idx in 0..cfg.max_layers {
            let train_input = augmented(train, train_aug.as_deref())?;
            let valid_input = augmented(valid, valid_aug.as_deref())?;
            let layer_seed = cfg.seed.child(layer_idx as u64);
            let folds = fold_assignment(n, cfg.cv_folds, layer_seed.child(u64::MAX));

            let fitted: Vec<(Forest, Vec<Probs>, Vec<Probs>)> = (0..2 * cfg.n_cascade_rf)
                .into_par_iter()
                .map(|j| {
                    let fcfg = cfg.forest_config(j);
                    let fseed = layer_seed.child(j as u64);
                    let mut aug = vec![[0.0; 2]; n];
                    for f in 0..cfg.cv_folds {
                        let fit_idx: Vec<usize> =
                            (0..n).filter(|&i| folds[i] != f).collect();
                        let fold_model =
                            Forest::fit(&train_input.select(&fit_idx), &fcfg, fseed.child(f as u64))?;
                        for i in (0..n).filter(|&i| folds[i] == f) {
                            aug[i] = fold_model.predict_proba_row(train_input.row(i))?;
                        }
                    }
                    let final_model =
                        Forest::fit(&train_input, &fcfg, fseed.child(cfg.cv_folds as u64))?;
                    let valid_probs = final_model.predict_proba(&valid_input)?;
                    Ok((final_model, aug, valid_probs))
                })
                .collect::<Result<_>>()?;

            let valid_per_forest: Vec<Vec<Probs>> =
                fitted.iter().map(|(_, _, v)| v.clone()).collect();
            let correct = (0..valid.n_rows())
                .filter(|&i| {
                    label_from_probs(mean_probs(&valid_per_forest, i)) == valid.label(i)
                })
                .count();
            let accuracy = correct as f64 / valid.n_rows() as f64;

            let train_per_forest: Vec<Vec<Probs>> =
                fitted.iter().map(|(_, a, _)| a.clone()).collect();
            let next_train_aug = flatten_probs(&train_per_forest, n);
            trace.layers.push(LayerTrace {
                fold_assignment: folds,
                augmentation: next_train_aug.clone(),
            });
            train_aug = Some(next_train_aug);
            valid_aug = Some(flatten_probs(&valid_per_forest, valid.n_rows()));
            layers.push(CascadeLayer {
                forests: fitted.into_iter().map(|(f, _, _)| f).collect(),
            });
            validation_accuracy.push(accuracy);
            if !stopper.observe(accuracy) {
                break;
            }
        }

        let model = CascadeModel {
            layers,
            base_dim: train.n_features(),
            n_cascade_rf: cfg.n_cascade_rf,
            best_layer: stopper.best_index(),
            validation_accuracy,
            scanner: None,
        };
        Ok((model, trace))
    }

    /// Input features for layer `upto` (0 = the base features): base
    /// concatenated with the augmentation emitted by the first `upto`
    /// layers.
    pub fn layer_features(&self, upto: usize, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.base_dim {
            return Err(Error::DimensionMismatch {
                expected: self.base_dim,
                got: row.len(),
            });
        }
        let mut input = row.to_vec();
        for layer in &self.layers[..upto] {
            let mut next = row.to_vec();
            for forest in &layer.forests {
                next.extend(forest.predict_proba_row(&input)?);
            }
            input = next;
        }
        Ok(input)
    }

    /// Per-layer validation accuracy recorded during growth.
    pub fn validation_trace(&self) -> &[f64] {
        &self.validation_accuracy
    }
}

impl Classifier for CascadeModel {
    fn predict_proba_row(&self, row: &[f64]) -> Result<Probs> {
        let base = match &self.scanner {
            Some(s) => s.transform_row(row)?,
            None => {
                if row.len() != self.base_dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.base_dim,
                        got: row.len(),
                    });
                }
                row.to_vec()
            }
        };
        let mut input = base.clone();
        for (l, layer) in self.layers[..self.best_layer].iter().enumerate() {
            let mut sum = [0.0; 2];
            let mut aug = Vec::with_capacity(2 * layer.forests.len());
            for forest in &layer.forests {
                let p = forest.predict_proba_row(&input)?;
                sum[0] += p[0];
                sum[1] += p[1];
                aug.extend(p);
            }
            if l + 1 == self.best_layer {
                let k = layer.forests.len() as f64;
                return Ok([sum[0] / k, sum[1] / k]);
            }
            input = base.clone();
            input.extend(aug);
        }
        Err(Error::EmptyDataset)
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
    use crate::forest::ForestMode;
    use crate::tree::{DecisionTree, Node};
    use rand::Rng;

    fn separable(n_per_class: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = RandomSeed(seed).rng();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n_per_class {
            rows.push((0..d).map(|_| rng.gen::<f64>()).collect());
            labels.push(ClassLabel::Benign);
            rows.push((0..d).map(|_| rng.gen::<f64>() + 4.0).collect());
            labels.push(ClassLabel::Malicious);
        }
        Dataset::from_rows_unnamed(rows, labels).unwrap()
    }

    fn small_cfg() -> CascadeConfig {
        CascadeConfig {
            max_layers: 3,
            n_cascade_rf: 1,
            trees_per_forest: 5,
            cv_folds: 2,
            seed: RandomSeed(21),
            ..CascadeConfig::default()
        }
    }

    #[test]
    fn early_stopping_traces_the_example() {
        let mut s = EarlyStopping::new(1);
        assert!(s.observe(0.91));
        assert!(s.observe(0.95));
        assert!(!s.observe(0.95));
        assert_eq!(s.best_index(), 2);
        assert_eq!(s.best_value(), 0.95);
    }

    #[test]
    fn early_stopping_patience_two_survives_one_dip() {
        let mut s = EarlyStopping::new(2);
        assert!(s.observe(0.9));
        assert!(s.observe(0.8));
        assert!(!s.observe(0.85));
        assert_eq!(s.best_index(), 1);
    }

    #[test]
    fn fold_assignment_is_balanced_and_deterministic() {
        let folds = fold_assignment(10, 3, RandomSeed(4));
        assert_eq!(folds, fold_assignment(10, 3, RandomSeed(4)));
        let mut counts = [0; 3];
        for &f in &folds {
            counts[f] += 1;
        }
        assert_eq!(counts.iter().sum::<usize>(), 10);
        assert!(counts.iter().all(|&c| c == 3 || c == 4));
    }

    #[test]
    fn single_layer_cap() {
        let train = separable(10, 3, 1);
        let valid = separable(5, 3, 2);
        let cfg = CascadeConfig {
            max_layers: 1,
            ..small_cfg()
        };
        let model = CascadeModel::fit(&train, &valid, &cfg).unwrap();
        assert_eq!(model.layers.len(), 1);
        assert_eq!(model.best_layer, 1);
    }

    #[test]
    fn separable_data_stops_at_layer_two() {
        let train = separable(12, 3, 3);
        let valid = separable(6, 3, 4);
        let model = CascadeModel::fit(&train, &valid, &small_cfg()).unwrap();
        assert_eq!(model.validation_accuracy[0], 1.0);
        assert_eq!(model.layers.len(), 2);
        assert_eq!(model.best_layer, 1);
    }

    #[test]
    fn dimension_recurrence_holds() {
        let train = separable(10, 4, 5);
        let valid = separable(5, 4, 6);
        let cfg = CascadeConfig {
            n_cascade_rf: 2,
            ..small_cfg()
        };
        let model = CascadeModel::fit(&train, &valid, &cfg).unwrap();
        let row = train.row(0);
        assert_eq!(model.layer_features(0, row).unwrap().len(), 4);
        for upto in 1..=model.layers.len() {
            assert_eq!(model.layer_features(upto, row).unwrap().len(), 4 + 2 * 2 * 2);
        }
    }

    fn stub_forest(probs: Probs) -> Forest {
        Forest {
            trees: vec![DecisionTree {
                nodes: vec![Node {
                    n: 1,
                    impurity: 0.0,
                    probs,
                    split: None,
                }],
                n_features: 1,
            }],
            mode: ForestMode::Random,
            oob_accuracy: None,
            n_features: 1,
        }
    }

    #[test]
    fn zero_layer_model_passes_features_through() {
        let model = CascadeModel {
            layers: vec![],
            base_dim: 3,
            n_cascade_rf: 1,
            best_layer: 0,
            validation_accuracy: vec![],
            scanner: None,
        };
        assert_eq!(
            model.layer_features(0, &[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn split_vote_breaks_toward_benign() {
        let model = CascadeModel {
            layers: vec![CascadeLayer {
                forests: vec![stub_forest([1.0, 0.0]), stub_forest([0.0, 1.0])],
            }],
            base_dim: 1,
            n_cascade_rf: 1,
            best_layer: 1,
            validation_accuracy: vec![0.5],
            scanner: None,
        };
        assert_eq!(model.predict_proba_row(&[0.0]).unwrap(), [0.5, 0.5]);
        let ds = Dataset::from_rows_unnamed(vec![vec![0.0]], vec![ClassLabel::Malicious]).unwrap();
        assert_eq!(model.predict(&ds).unwrap(), vec![ClassLabel::Benign]);
    }

    #[test]
    fn unanimous_forests_carry_through() {
        let model = CascadeModel {
            layers: vec![CascadeLayer {
                forests: vec![stub_forest([0.9, 0.1]), stub_forest([0.9, 0.1])],
            }],
            base_dim: 1,
            n_cascade_rf: 1,
            best_layer: 1,
            validation_accuracy: vec![0.5],
            scanner: None,
        };
        let p = model.predict_proba_row(&[0.0]).unwrap();
        assert!((p[0] - 0.9).abs() < 1e-12 && (p[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn fit_is_deterministic() {
        let train = separable(10, 3, 7);
        let valid = separable(5, 3, 8);
        let a = CascadeModel::fit(&train, &valid, &small_cfg()).unwrap();
        let b = CascadeModel::fit(&train, &valid, &small_cfg()).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.predict_proba_row(train.row(3)).unwrap(),
            b.predict_proba_row(train.row(3)).unwrap()
        );
    }

    #[test]
    fn single_class_validation_rejected() {
        let train = separable(8, 2, 9);
        let valid = Dataset::from_rows_unnamed(
            vec![vec![0.1, 0.2], vec![0.3, 0.4]],
            vec![ClassLabel::Benign, ClassLabel::Benign],
        )
        .unwrap();
        assert!(matches!(
            CascadeModel::fit(&train, &valid, &small_cfg()),
            Err(Error::DegenerateValidation)
        ));
    }

    #[test]
    fn width_mismatch_rejected() {
        let train = separable(8, 3, 9);
        let valid = separable(4, 2, 9);
        assert!(matches!(
            CascadeModel::fit(&train, &valid, &small_cfg()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn augmentation_comes_from_out_of_fold_models() {
        // 12-row fixture: rebuild every fold model and check each row's
        // augmentation against the model that excluded it.
        let train = separable(6, 2, 10);
        let valid = separable(4, 2, 11);
        let cfg = CascadeConfig {
            max_layers: 1,
            n_cascade_rf: 1,
            trees_per_forest: 3,
            cv_folds: 3,
            seed: RandomSeed(33),
            ..CascadeConfig::default()
        };
        let (_, trace) = CascadeModel::fit_traced(&train, &valid, &cfg).unwrap();
        let layer = &trace.layers[0];
        let layer_seed = cfg.seed.child(0);
        assert_eq!(
            layer.fold_assignment,
            fold_assignment(12, 3, layer_seed.child(u64::MAX))
        );
        for j in 0..2 {
            let fseed = layer_seed.child(j as u64);
            for f in 0..cfg.cv_folds {
                let fit_idx: Vec<usize> = (0..12)
                    .filter(|&i| layer.fold_assignment[i] != f)
                    .collect();
                let fold_model =
                    Forest::fit(&train.select(&fit_idx), &cfg.forest_config(j), fseed.child(f as u64))
                        .unwrap();
                for i in (0..12).filter(|&i| layer.fold_assignment[i] == f) {
                    let expected = fold_model.predict_proba_row(train.row(i)).unwrap();
                    assert_eq!(&layer.augmentation[i][2 * j..2 * j + 2], expected);
                }
            }
        }
    }

    #[test]
    fn cross_fitting_does_not_memorize_labels() {
        // unique-id feature with coin-flip labels: an implementation that
        // augmented with in-fold predictions would echo every row's own
        // label; honest cross-fitting is near chance
        let mut rng = RandomSeed(55).rng();
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
        let labels: Vec<ClassLabel> = (0..40)
            .map(|_| {
                if rng.gen::<bool>() {
                    ClassLabel::Malicious
                } else {
                    ClassLabel::Benign
                }
            })
            .collect();
        let train = Dataset::from_rows(rows, labels, vec!["id".into()]).unwrap();
        let valid = Dataset::from_rows(
            vec![vec![100.0], vec![101.0]],
            vec![ClassLabel::Benign, ClassLabel::Malicious],
            vec!["id".into()],
        )
        .unwrap();
        let cfg = CascadeConfig {
            max_layers: 1,
            n_cascade_rf: 1,
            trees_per_forest: 5,
            cv_folds: 2,
            seed: RandomSeed(70),
            ..CascadeConfig::default()
        };
        let (_, trace) = CascadeModel::fit_traced(&train, &valid, &cfg).unwrap();
        let echoed = (0..40)
            .filter(|&i| {
                let aug = &trace.layers[0].augmentation[i];
                let predicted = label_from_probs([aug[0], aug[1]]);
                predicted == train.label(i)
            })
            .count();
        assert!(
            echoed < 32,
            "{echoed}/40 augmentation vectors echo their own label"
        );
    }

    #[test]
    fn single_layer_equals_flat_ensemble() {
        let train = separable(10, 3, 12);
        let valid = separable(5, 3, 13);
        let cfg = CascadeConfig {
            max_layers: 1,
            n_cascade_rf: 2,
            trees_per_forest: 4,
            cv_folds: 2,
            seed: RandomSeed(90),
            ..CascadeConfig::default()
        };
        let model = CascadeModel::fit(&train, &valid, &cfg).unwrap();
        let layer_seed = cfg.seed.child(0);
        let flat: Vec<Forest> = (0..4)
            .map(|j| {
                Forest::fit(
                    &train,
                    &cfg.forest_config(j),
                    layer_seed.child(j as u64).child(cfg.cv_folds as u64),
                )
                .unwrap()
            })
            .collect();
        for i in 0..valid.n_rows() {
            let cascade_p = model.predict_proba_row(valid.row(i)).unwrap();
            let mut sum = [0.0; 2];
            for f in &flat {
                let p = f.predict_proba_row(valid.row(i)).unwrap();
                sum[0] += p[0];
                sum[1] += p[1];
            }
            assert!((cascade_p[0] - sum[0] / 4.0).abs() < 1e-12);
            assert!((cascade_p[1] - sum[1] / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scanner_travels_with_the_model() {
        use crate::scan::Scanner;
        let train = separable(15, 6, 14);
        let valid = separable(6, 6, 15);
        let scanner = Scanner::fit(
            &train,
            2,
            1,
            &ForestConfig {
                n_trees: 5,
                ..ForestConfig::default()
            },
            RandomSeed(16),
        )
        .unwrap();
        let model =
            CascadeModel::fit_with_scanner(&train, &valid, &small_cfg(), scanner).unwrap();
        assert_eq!(model.base_dim, 20);
        let acc = crate::model::accuracy(&model, &valid).unwrap();
        assert!(acc > 0.9, "accuracy {acc}");
        assert!(matches!(
            model.predict_proba_row(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn best_layer_attains_recorded_maximum() {
        let train = separable(12, 3, 17);
        let valid = separable(6, 3, 18);
        let model = CascadeModel::fit(&train, &valid, &small_cfg()).unwrap();
        let best = model.validation_accuracy[model.best_layer - 1];
        for &a in &model.validation_accuracy {
            assert!(best >= a);
        }
        assert!(model.layers.len() <= 3);
    }
}
