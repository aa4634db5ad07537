//! The common classifier interface and model-agnostic permutation
//! importance.

use rand::seq::SliceRandom;

use crate::data::{ClassLabel, Dataset, RandomSeed};
use crate::error::Result;

/// Class-probability vector, indexed by [`ClassLabel::code`].
pub type Probs = [f64; 2];

/// Argmax with ties toward class 0 (benign).
pub fn label_from_probs(p: Probs) -> ClassLabel {
    if p[1] > p[0] {
        ClassLabel::Malicious
    } else {
        ClassLabel::Benign
    }
}

/// Anything that can score rows. Models are fitted by construction, so
/// there is no unfitted state to guard against.
pub trait Classifier: Send + Sync {
    fn predict_proba_row(&self, row: &[f64]) -> Result<Probs>;

    fn predict_proba(&self, ds: &Dataset) -> Result<Vec<Probs>> {
        ds.rows().map(|r| self.predict_proba_row(r)).collect()
    }

    fn predict(&self, ds: &Dataset) -> Result<Vec<ClassLabel>> {
        Ok(self
            .predict_proba(ds)?
            .into_iter()
            .map(label_from_probs)
            .collect())
    }
}

/// Fraction of rows the model labels correctly.
pub fn accuracy(model: &dyn Classifier, ds: &Dataset) -> Result<f64> {
    let predictions = model.predict(ds)?;
    let correct = predictions
        .iter()
        .zip(ds.labels())
        .filter(|(p, l)| p == l)
        .count();
    Ok(correct as f64 / ds.n_rows() as f64)
}

/// Shuffles per feature when measuring permutation importance.
pub const PERMUTATION_REPEATS: usize = 5;

/// Mean accuracy drop after shuffling one column, per feature. Run this
/// on held-out data; on training data strong learners hide nothing.
pub fn permutation_importance(
    model: &dyn Classifier,
    ds: &Dataset,
    seed: RandomSeed,
) -> Result<Vec<f64>> {
    let base = accuracy(model, ds)?;
    let rows: Vec<Vec<f64>> = ds.rows().map(<[f64]>::to_vec).collect();
    let mut importances = Vec::with_capacity(ds.n_features());
    for feature in 0..ds.n_features() {
        let column = ds.column(feature);
        let mut drop_sum = 0.0;
        for rep in 0..PERMUTATION_REPEATS {
            let mut shuffled = column.clone();
            let mut rng = seed.child(feature as u64).child(rep as u64).rng();
            shuffled.shuffle(&mut rng);
            let mut permuted = rows.clone();
            for (row, v) in permuted.iter_mut().zip(&shuffled) {
                row[feature] = *v;
            }
            let permuted =
                Dataset::from_rows(permuted, ds.labels().to_vec(), ds.feature_names().to_vec())?;
            drop_sum += base - accuracy(model, &permuted)?;
        }
        importances.push(drop_sum / PERMUTATION_REPEATS as f64);
    }
    Ok(importances)
}
