//! Run manifest: ties every file in an output directory to one configuration.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::store;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
    pub records: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub n: usize,
    #[serde(default)]
    pub stages: BTreeMap<String, StageRecord>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

pub fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl RunManifest {
    pub fn new(config_hash: &str, n: usize) -> Self {
        Self {
            config_hash: config_hash.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            n,
            stages: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    /// Loads the manifest of `dir` and checks it belongs to `config_hash`.
    pub fn load(dir: &Path, config_hash: &str) -> Result<Self> {
        let path = store::path(dir, store::MANIFEST);
        if !path.exists() {
            return Err(HarnessError::MissingStage {
                what: "run manifest",
                path,
                stage: "plan",
            });
        }
        let m: Self = store::read_json(&path)?;
        check_hash(&path, config_hash, Some(&m.config_hash))?;
        Ok(m)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        store::write_json(&store::path(dir, store::MANIFEST), self)
    }

    pub fn record(&mut self, stage: &str, started: f64, records: usize) {
        self.stages.insert(
            stage.into(),
            StageRecord {
                started,
                finished: now(),
                records,
            },
        );
    }
}

/// A record's hash must be present and equal to the run's.
pub fn check_hash(path: &Path, expected: &str, found: Option<&str>) -> Result<()> {
    match found {
        Some(h) if h == expected => Ok(()),
        other => Err(HarnessError::HashMismatch {
            path: path.to_path_buf(),
            expected: expected.into(),
            found: other.unwrap_or("<none>").into(),
        }),
    }
}
