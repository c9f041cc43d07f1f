//! Repeated k-fold cross-validation benchmarking for descriptor-set x method
//! (D-M) grids.
//!
//! The pipeline runs in two phases. [`orchestrator::run_model_train`] fits
//! every D-M combination under seeded repeated k-fold cross-validation and
//! persists out-of-fold predictions to a run directory. Assessment then
//! reduces those predictions to one performance value per (split, combo)
//! cell ([`measures`]), fits an additive blocked ANOVA with split as the
//! block ([`inference::anova`]), and compares all combo pairs with
//! Tukey-Kramer adjusted p-values ([`inference::tukey`]). Results render as
//! accumulation curves ([`curves`]) and a multiple-comparisons-similarity
//! heatmap ([`mcs`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curves;
pub mod dataio;
pub mod error;
pub mod folds;
pub mod inference;
pub mod learners;
pub mod matrix;
pub mod mcs;
pub mod measures;
pub mod orchestrator;
pub mod rng;
pub mod special;
mod svg;

pub use error::{Error, Result};

/// Tool version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
