//! Run manifest recording everything needed to reproduce an output folder.

use std::time::{SystemTime, UNIX_EPOCH};

use lasa_core::geometry::Normalization;
use lasa_core::{Hyperparameters, SamplerConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    /// Distinct vertices after clean-up.
    pub vertices: usize,
    pub normalization: Normalization,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperparameters: Option<Hyperparameters>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerConfig>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Seconds since the Unix epoch; taken from `SOURCE_DATE_EPOCH` when set.
    pub created_unix: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Command options as resolved after defaults.
    pub options: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, options: serde_json::Value) -> Result<Self> {
        Ok(RunManifest {
            tool: "lasa".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            created_unix: timestamp()?,
            seed,
            options,
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }
}

/// `SOURCE_DATE_EPOCH` if set, else the wall clock.
pub fn timestamp() -> Result<u64> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("SOURCE_DATE_EPOCH is not an integer: {s:?}"))),
        Err(_) => SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .map_err(|e| CliError::Internal(e.to_string())),
    }
}
