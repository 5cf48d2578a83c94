//! Credit-risk modelling and explanation core.
//!
//! Everything in this crate is pure computation over in-memory data and runs
//! without `std` (an allocator is required). File formats, the synthetic data
//! generator and the command-line driver live in the companion `credx` crate.
//!
//! ## Modules
//!
//! - [`ingest`]: raw tables, target derivation, macro-series join, one-hot
//!   encoding, imputation, z-score standardization, collinearity pruning and
//!   stratified splitting.
//! - [`models`]: logistic regression, a class-balanced random forest and a
//!   dropout MLP behind one probability contract ([`models::Classifier`]).
//! - [`metrics`]: confusion counts, precision/recall/F1, ROC AUC and the
//!   cross-model comparison table.
//! - [`explain`]: LIME with a weighted ridge surrogate, Kernel SHAP and an
//!   exact Shapley oracle.
//! - [`scorecard`]: the five-dimension explainability scorecard.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod explain;
pub mod ingest;
pub mod linalg;
pub mod metrics;
pub mod models;
pub mod rng;
pub mod scorecard;

pub use error::{Error, Result};
pub use linalg::Matrix;
