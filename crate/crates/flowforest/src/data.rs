//! Datasets, binary class labels, deterministic splitting, and seeded
//! randomness.
//!
//! [`Dataset`] is the currency of every learner and resampler in this crate:
//! an immutable numeric feature matrix with one binary label per row. All
//! mutation happens by constructing new datasets, so a `Dataset` can be
//! shared freely across worker threads.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary flow label. Malicious is the positive class throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    Benign,
    Malicious,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 2] = [ClassLabel::Benign, ClassLabel::Malicious];

    /// Numeric code: 0 = Benign, 1 = Malicious.
    pub fn code(self) -> usize {
        match self {
            ClassLabel::Benign => 0,
            ClassLabel::Malicious => 1,
        }
    }

    pub fn from_code(code: usize) -> Option<ClassLabel> {
        match code {
            0 => Some(ClassLabel::Benign),
            1 => Some(ClassLabel::Malicious),
            _ => None,
        }
    }

    pub fn other(self) -> ClassLabel {
        match self {
            ClassLabel::Benign => ClassLabel::Malicious,
            ClassLabel::Malicious => ClassLabel::Benign,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Benign => write!(f, "benign"),
            ClassLabel::Malicious => write!(f, "malicious"),
        }
    }
}

/// Root seed for an experiment. Every randomized unit of work derives its
/// own child seed from this one, so results do not depend on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    /// Derive a child seed from a tag. Chaining `child` calls gives each
    /// parallel unit (tree t of forest f in layer l) a stable seed that is
    /// independent of thread count.
    pub fn child(self, tag: u64) -> RandomSeed {
        RandomSeed(splitmix64(self.0 ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15))))
    }

    /// A reproducible RNG for this seed.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Immutable numeric feature matrix plus label vector and feature names.
///
/// Construction validates every invariant: rows are rectangular, all values
/// finite, label count matches row count, and feature names are unique.
/// Code holding a `Dataset` may therefore assume finiteness everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n_features: usize,
    labels: Vec<ClassLabel>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Build a dataset from row vectors.
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        labels: Vec<ClassLabel>,
        feature_names: Vec<String>,
    ) -> Result<Dataset> {
        let n_features = feature_names.len();
        if rows.len() != labels.len() {
            return Err(Error::LabelLengthMismatch {
                rows: rows.len(),
                labels: labels.len(),
            });
        }
        for (i, name) in feature_names.iter().enumerate() {
            if feature_names[..i].contains(name) {
                return Err(Error::DuplicateFeatureName { name: name.clone() });
            }
        }
        let mut values = Vec::with_capacity(rows.len() * n_features);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::RowWidthMismatch {
                    row: r,
                    got: row.len(),
                    expected: n_features,
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteValue { row: r, column: c });
                }
                values.push(v);
            }
        }
        Ok(Dataset {
            values,
            n_features,
            labels,
            feature_names,
        })
    }

    /// Anonymous feature names `f0..f{d-1}`, handy for synthetic fixtures.
    pub fn from_rows_unnamed(rows: Vec<Vec<f64>>, labels: Vec<ClassLabel>) -> Result<Dataset> {
        let d = rows.first().map_or(0, Vec::len);
        let names = (0..d).map(|i| format!("f{i}")).collect();
        Dataset::from_rows(rows, labels, names)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn label(&self, i: usize) -> ClassLabel {
        self.labels[i]
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Values of one feature column, in row order.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.row(i)[j]).collect()
    }

    /// New dataset holding the given rows of this one, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            values,
            n_features: self.n_features,
            labels,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Serialize as CSV: one column per feature plus a final `label` column.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for name in &self.feature_names {
            out.push_str(name);
            out.push(',');
        }
        out.push_str("label\n");
        for i in 0..self.n_rows() {
            for v in self.row(i) {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{}\n", self.labels[i].code()));
        }
        out
    }
}

/// Per-class row counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts {
    counts: [usize; 2],
}

impl ClassCounts {
    pub fn new(benign: usize, malicious: usize) -> ClassCounts {
        ClassCounts {
            counts: [benign, malicious],
        }
    }

    pub fn get(&self, label: ClassLabel) -> usize {
        self.counts[label.code()]
    }

    pub fn set(&mut self, label: ClassLabel, count: usize) {
        self.counts[label.code()] = count;
    }

    pub fn total(&self) -> usize {
        self.counts[0] + self.counts[1]
    }

    /// The strictly smaller class, if the counts differ.
    pub fn minority(&self) -> Option<ClassLabel> {
        use std::cmp::Ordering::*;
        match self.counts[0].cmp(&self.counts[1]) {
            Less => Some(ClassLabel::Benign),
            Greater => Some(ClassLabel::Malicious),
            Equal => None,
        }
    }

    pub fn max(&self) -> usize {
        self.counts[0].max(self.counts[1])
    }
}

/// Count rows per class.
pub fn class_counts(ds: &Dataset) -> ClassCounts {
    let mut counts = ClassCounts::default();
    for &label in ds.labels() {
        counts.counts[label.code()] += 1;
    }
    counts
}

/// Stratified split of row indices into (train, test).
///
/// Per class, the test side receives `round(count * test_fraction)` rows,
/// at least 1. The partition is exact: every index lands in exactly one
/// side. Deterministic under the seed.
pub fn stratified_split_indices(
    labels: &[ClassLabel],
    test_fraction: f64,
    seed: RandomSeed,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidTestFraction(test_fraction));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, label) in labels.iter().enumerate() {
        by_class[label.code()].push(i);
    }
    for label in ClassLabel::ALL {
        let count = by_class[label.code()].len();
        if count < 2 {
            return Err(Error::ClassTooSmall {
                label,
                count,
                required: 2,
            });
        }
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for label in ClassLabel::ALL {
        let indices = &mut by_class[label.code()];
        let mut rng = seed.child(label.code() as u64).rng();
        indices.shuffle(&mut rng);
        let n_test = ((indices.len() as f64 * test_fraction).round() as usize).max(1);
        test.extend_from_slice(&indices[..n_test]);
        train.extend_from_slice(&indices[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Stratified train/test split of a dataset. See [`stratified_split_indices`].
pub fn stratified_split(
    ds: &Dataset,
    test_fraction: f64,
    seed: RandomSeed,
) -> Result<(Dataset, Dataset)> {
    let (train_idx, test_idx) = stratified_split_indices(ds.labels(), test_fraction, seed)?;
    Ok((ds.select(&train_idx), ds.select(&test_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(n_benign: usize, n_malicious: usize) -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_benign {
            rows.push(vec![i as f64, 0.0]);
            labels.push(ClassLabel::Benign);
        }
        for i in 0..n_malicious {
            rows.push(vec![i as f64, 1.0]);
            labels.push(ClassLabel::Malicious);
        }
        Dataset::from_rows_unnamed(rows, labels).unwrap()
    }

    #[test]
    fn rejects_non_finite_values() {
        let err = Dataset::from_rows_unnamed(vec![vec![f64::NAN]], vec![ClassLabel::Benign]);
        assert!(matches!(
            err,
            Err(Error::NonFiniteValue { row: 0, column: 0 })
        ));
    }

    #[test]
    fn rejects_duplicate_feature_names() {
        let err = Dataset::from_rows(
            vec![vec![1.0, 2.0]],
            vec![ClassLabel::Benign],
            vec!["a".into(), "a".into()],
        );
        assert!(matches!(err, Err(Error::DuplicateFeatureName { .. })));
    }

    #[test]
    fn class_counts_empty_dataset() {
        let ds = Dataset::from_rows_unnamed(vec![], vec![]).unwrap();
        let counts = class_counts(&ds);
        assert_eq!(counts.get(ClassLabel::Benign), 0);
        assert_eq!(counts.get(ClassLabel::Malicious), 0);
    }

    #[test]
    fn class_counts_direct() {
        let ds = labeled(7, 3);
        let counts = class_counts(&ds);
        assert_eq!(counts.get(ClassLabel::Benign), 7);
        assert_eq!(counts.get(ClassLabel::Malicious), 3);
        assert_eq!(counts.total(), 10);
    }

    #[test]
    fn split_exact_divisibility() {
        let ds = labeled(50, 50);
        let (train, test) = stratified_split(&ds, 0.2, RandomSeed(7)).unwrap();
        let tc = class_counts(&test);
        assert_eq!(tc.get(ClassLabel::Benign), 10);
        assert_eq!(tc.get(ClassLabel::Malicious), 10);
        assert_eq!(train.n_rows(), 80);
    }

    #[test]
    fn split_rounds_per_class() {
        // round(90 * 0.3) = 27, round(10 * 0.3) = 3
        let ds = labeled(90, 10);
        let (_, test) = stratified_split(&ds, 0.3, RandomSeed(0)).unwrap();
        let tc = class_counts(&test);
        assert_eq!(tc.get(ClassLabel::Benign), 27);
        assert_eq!(tc.get(ClassLabel::Malicious), 3);
    }

    #[test]
    fn split_is_deterministic() {
        let labels: Vec<ClassLabel> = (0..40)
            .map(|i| {
                if i % 3 == 0 {
                    ClassLabel::Malicious
                } else {
                    ClassLabel::Benign
                }
            })
            .collect();
        let a = stratified_split_indices(&labels, 0.25, RandomSeed(99)).unwrap();
        let b = stratified_split_indices(&labels, 0.25, RandomSeed(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn split_is_a_partition() {
        let labels: Vec<ClassLabel> = (0..37)
            .map(|i| {
                if i % 5 == 0 {
                    ClassLabel::Malicious
                } else {
                    ClassLabel::Benign
                }
            })
            .collect();
        let (train, test) = stratified_split_indices(&labels, 0.3, RandomSeed(3)).unwrap();
        let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
    }

    #[test]
    fn split_errors_on_tiny_class() {
        let ds = labeled(5, 1);
        let err = stratified_split(&ds, 0.5, RandomSeed(0));
        match err {
            Err(Error::ClassTooSmall { label, count, .. }) => {
                assert_eq!(label, ClassLabel::Malicious);
                assert_eq!(count, 1);
            }
            other => panic!("expected ClassTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn child_seeds_differ_by_tag() {
        let root = RandomSeed(42);
        assert_ne!(root.child(0), root.child(1));
        assert_eq!(root.child(3).child(5), root.child(3).child(5));
        assert_ne!(root.child(3).child(5), root.child(5).child(3));
    }

    #[test]
    fn csv_round_shape() {
        let ds = Dataset::from_rows(
            vec![vec![1.5, 2.0], vec![0.25, 3.0]],
            vec![ClassLabel::Benign, ClassLabel::Malicious],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let csv = ds.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "a,b,label");
        assert_eq!(lines[1], "1.5,2,0");
        assert_eq!(lines[2], "0.25,3,1");
    }
}
