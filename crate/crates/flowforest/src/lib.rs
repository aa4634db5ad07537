//! Deep-forest toolkit for flagging malicious network flows.
//!
//! The crate covers the full path from raw Zeek `conn.log` files to a
//! trained classifier and an evaluation report:
//!
//! 1. [`ingest`] parses connection logs, imputes missing fields, encodes
//!    everything numerically, and robust-scales the result.
//! 2. [`resample`] rebalances the training split (SMOTE, hybrid
//!    over/under sampling, or SMOTEENN), since benign flows outnumber
//!    malicious ones badly in real captures.
//! 3. [`forest`] and [`cascade`] build the deep-forest classifier:
//!    stacked layers of random and completely-random forests, optionally
//!    fed by multi-grained scanning. [`baselines`] holds the single
//!    decision tree and logistic regression used for comparison.
//! 4. [`metrics`] scores predictions and renders reports; [`featrank`]
//!    fuses feature-importance rankings across methods.
//! 5. [`pipeline`] wires the stages together behind one config struct,
//!    and [`archive`] persists trained models.
//!
//! Everything randomized takes a [`data::RandomSeed`]; equal seeds give
//! byte-identical outputs regardless of thread count.
//!
//! ```
//! use flowforest::data::{ClassLabel, Dataset, RandomSeed};
//! use flowforest::forest::{Forest, ForestConfig};
//! use flowforest::model::Classifier;
//!
//! let rows = vec![
//!     vec![0.0, 0.1], vec![0.1, 0.0], vec![0.2, 0.1],
//!     vec![5.0, 5.1], vec![5.1, 5.0], vec![5.2, 5.1],
//! ];
//! let labels = vec![
//!     ClassLabel::Benign, ClassLabel::Benign, ClassLabel::Benign,
//!     ClassLabel::Malicious, ClassLabel::Malicious, ClassLabel::Malicious,
//! ];
//! let ds = Dataset::from_rows_unnamed(rows, labels)?;
//! let forest = Forest::fit(&ds, &ForestConfig::default(), RandomSeed(7))?;
//! let pred = forest.predict(&ds)?;
//! assert_eq!(pred, ds.labels());
//! # Ok::<(), flowforest::error::Error>(())
//! ```

pub mod archive;
pub mod baselines;
pub mod cascade;
pub mod data;
pub mod error;
pub mod featrank;
pub mod forest;
#[cfg(doctest)]
mod guide;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod resample;
pub mod scan;
pub mod tree;

pub use data::{ClassLabel, Dataset, RandomSeed};
pub use error::{Error, Result};
