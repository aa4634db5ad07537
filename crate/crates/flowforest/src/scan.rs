//! Multi-grained scanning: re-represent each row as the concatenated
//! class-probability vectors of forests trained on sliding window slices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, RandomSeed};
use crate::error::{Error, Result};
use crate::forest::{Forest, ForestConfig, ForestMode};
use crate::model::Classifier;

/// A fitted scanner: one random and one completely-random forest, both
/// trained on every window slice of every training row, each slice
/// carrying its source row's label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scanner {
    pub window: usize,
    pub stride: usize,
    pub input_dim: usize,
    pub rf: Forest,
    pub crf: Forest,
}

impl Scanner {
    /// Windows per row for the fitted geometry.
    pub fn n_windows(&self) -> usize {
        (self.input_dim - self.window) / self.stride + 1
    }

    /// Transformed width: windows x 2 forests x 2 classes.
    pub fn output_dim(&self) -> usize {
        self.n_windows() * 4
    }

    pub fn fit(
        ds: &Dataset,
        window: usize,
        stride: usize,
        trees: &ForestConfig,
        seed: RandomSeed,
    ) -> Result<Scanner> {
        let d = ds.n_features();
        if window == 0 || window > d {
            return Err(Error::WindowTooWide {
                window,
                features: d,
            });
        }
        if stride == 0 {
            return Err(Error::InvalidParameter {
                what: "stride",
                requirement: "at least 1",
                got: "0".into(),
            });
        }
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }

        let n_windows = (d - window) / stride + 1;
        let mut rows = Vec::with_capacity(ds.n_rows() * n_windows);
        let mut labels = Vec::with_capacity(ds.n_rows() * n_windows);
        for i in 0..ds.n_rows() {
            let row = ds.row(i);
            for p in 0..n_windows {
                let start = p * stride;
                rows.push(row[start..start + window].to_vec());
                labels.push(ds.label(i));
            }
        }
        let names = (0..window).map(|j| format!("slice_{j}")).collect();
        let slices = Dataset::from_rows(rows, labels, names)?;

        let rf_cfg = ForestConfig {
            mode: ForestMode::Random,
            ..*trees
        };
        let crf_cfg = ForestConfig {
            mode: ForestMode::CompletelyRandom,
            ..*trees
        };
        Ok(Scanner {
            window,
            stride,
            input_dim: d,
            rf: Forest::fit(&slices, &rf_cfg, seed.child(0))?,
            crf: Forest::fit(&slices, &crf_cfg, seed.child(1))?,
        })
    }

    /// Re-represent one row. Output order: window position major, forest
    /// (random, then completely random) next, class index innermost.
    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: row.len(),
            });
        }
        let mut out = Vec::with_capacity(self.output_dim());
        for p in 0..self.n_windows() {
            let start = p * self.stride;
            let slice = &row[start..start + self.window];
            out.extend(self.rf.predict_proba_row(slice)?);
            out.extend(self.crf.predict_proba_row(slice)?);
        }
        Ok(out)
    }

    /// Transform every row, keeping labels. Feature names encode the
    /// window position, forest, and class of each coordinate.
    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        let rows: Vec<Vec<f64>> = (0..ds.n_rows())
            .into_par_iter()
            .map(|i| self.transform_row(ds.row(i)))
            .collect::<Result<_>>()?;
        let mut names = Vec::with_capacity(self.output_dim());
        for p in 0..self.n_windows() {
            for forest in ["rf", "crf"] {
                for class in 0..2 {
                    names.push(format!("scan_w{p}_{forest}_c{class}"));
                }
            }
        }
        Dataset::from_rows(rows, ds.labels().to_vec(), names)
    }
}
