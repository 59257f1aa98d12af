//! Run manifests: enough metadata to reproduce a report bit for bit.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Identifies one CLI invocation. Two runs with identical manifests (the
/// timestamp aside) produce identical numerical output.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, parameters: BTreeMap<String, String>) -> RunManifest {
        RunManifest {
            subcommand: subcommand.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// The top-level report shape: `{"manifest": …, "result": …}`.
#[derive(Serialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub result: serde_json::Value,
}

/// Builds a parameter map from display pairs.
pub fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}
