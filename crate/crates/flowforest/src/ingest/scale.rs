//! Robust scaling: per-column centering by the median and division by the
//! interquartile range, which keeps extreme byte/packet counts from
//! dominating distance computations downstream.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Per-column median/IQR scaler. Fit on the training split only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustScaler {
    medians: Vec<f64>,
    iqrs: Vec<f64>,
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl RobustScaler {
    /// Fit medians and interquartile ranges on every column of `train`.
    /// Columns with IQR 0 divide by 1 instead.
    pub fn fit(train: &Dataset) -> Result<RobustScaler> {
        if train.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut medians = Vec::with_capacity(train.n_features());
        let mut iqrs = Vec::with_capacity(train.n_features());
        for j in 0..train.n_features() {
            let mut column = train.column(j);
            column.sort_by(f64::total_cmp);
            medians.push(quantile(&column, 0.5));
            let iqr = quantile(&column, 0.75) - quantile(&column, 0.25);
            iqrs.push(if iqr == 0.0 { 1.0 } else { iqr });
        }
        Ok(RobustScaler { medians, iqrs })
    }

    /// Apply `(x - median) / iqr` to every cell.
    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        if ds.n_features() != self.medians.len() {
            return Err(Error::ScalerWidthMismatch {
                expected: self.medians.len(),
                got: ds.n_features(),
            });
        }
        let rows = ds
            .rows()
            .map(|row| {
                row.iter()
                    .zip(self.medians.iter().zip(&self.iqrs))
                    .map(|(&x, (&m, &iqr))| (x - m) / iqr)
                    .collect()
            })
            .collect();
        Dataset::from_rows(rows, ds.labels().to_vec(), ds.feature_names().to_vec())
    }

    pub fn n_columns(&self) -> usize {
        self.medians.len()
    }
}
