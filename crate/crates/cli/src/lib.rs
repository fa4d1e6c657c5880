//! Experiment harness around `hollowgram-core`.
//!
//! Provides the phase-diagram grid engine (parallel, deterministic,
//! resumable from a line-delimited checkpoint), risk-versus-SNR curves,
//! the binary dataset format, CSV and SVG emitters, plain-text config
//! parsing, run manifests, and the `hollowgram` command-line tool.

pub mod cli;
pub mod config_file;
pub mod csv_out;
pub mod dataset_file;
mod error;
pub mod experiments;
pub mod manifest;
pub mod presets;
pub mod selftest;
pub mod svg;

pub use error::HarnessError;
