//! Files, synthetic data and the command-line driver for the `credx-core`
//! credit-risk pipeline.
//!
//! - [`csv_io`]: loan CSV + schema TOML loading, macro-series CSV, the
//!   prepared matrix files and their metadata sidecar.
//! - [`model_file`]: versioned model container.
//! - [`report`]: schema-tagged JSON reports.
//! - [`notice`]: adverse-action notices.
//! - [`radar`]: SVG radar chart of scorecards.
//! - [`synth`]: the bundled synthetic corpus.
//! - [`config`], [`cli`]: run configuration and the `credx` commands.

pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod model_file;
pub mod notice;
pub mod radar;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
