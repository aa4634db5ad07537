//! Compiles and runs every code snippet in the book under `cargo test
//! --doc`, so the guide can never drift from the library.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/ingest.md")]
pub mod ingest {}

#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}

#[doc = include_str!("../../../book/src/trees.md")]
pub mod trees {}

#[doc = include_str!("../../../book/src/forests.md")]
pub mod forests {}

#[doc = include_str!("../../../book/src/scanning.md")]
pub mod scanning {}

#[doc = include_str!("../../../book/src/cascade.md")]
pub mod cascade {}

#[doc = include_str!("../../../book/src/resampling.md")]
pub mod resampling {}

#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}

#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}

#[doc = include_str!("../../../book/src/featrank.md")]
pub mod featrank {}

#[doc = include_str!("../../../book/src/pipeline.md")]
pub mod pipeline {}
