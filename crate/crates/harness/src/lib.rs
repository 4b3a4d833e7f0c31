//! Configuration, file-backed pipeline stages and exact oracles for
//! randomized-measurement unitarity experiments.
//!
//! An output directory holds one run: `manifest.json` plus one file per
//! stage (`circuits.jsonl`, `shots.jsonl`, `estimates.jsonl`/`.csv`,
//! `fits.json`, `report.json`, `decay.csv`, `oracle.json`). Every record
//! carries the SHA-256 hash of the configuration that produced it.

pub mod config;
pub mod error;
pub mod manifest;
pub mod oracle;
pub mod pipeline;
pub mod store;

pub use config::{ExperimentConfig, Resolved};
pub use error::{HarnessError, Result};
