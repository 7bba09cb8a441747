//! Machine-readable run reports.
//!
//! Every subcommand that does real work emits a JSON report describing what
//! ran, on which input, with which constants, and what came out. The schema
//! is versioned; consumers should reject reports whose `schema_version` they
//! do not understand.

use std::fs;
use std::path::Path;

use regulus::ConstantsConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Report for a single `regularize`, `oracle`, or `verify` invocation.
///
/// Invariant: a report with `verdict == "success"` from an exact-degree
/// method carries `certified_regular == Some(true)`; the certification is
/// re-run against the host before the report is written, never assumed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    /// Subcommand that produced this report.
    pub command: String,
    /// Extraction method, when one was selected.
    pub method: Option<String>,
    /// Target degree, when the command takes one.
    pub r: Option<usize>,
    /// Root seed; per-stage generators are derived from it by label.
    pub seed: u64,
    /// Constants the run used, snapshotted at invocation time.
    pub config: ConstantsConfig,
    pub input_path: Option<String>,
    /// SHA-256 of the raw input file bytes, hex-encoded.
    pub input_sha256: Option<String>,
    /// Human-readable stage trace, in execution order.
    pub stages: Vec<String>,
    /// One of: success, found, absent, route_failed, indeterminate,
    /// invalid_input, internal_error.
    pub verdict: String,
    pub error: Option<String>,
    /// Some(true) after `check_regular_witness` passed against the host.
    pub certified_regular: Option<bool>,
    /// Some(true) after the max/min degree ratio was checked to be at most 4.
    pub certified_almost_regular: Option<bool>,
    /// Max over min subgraph degree, recorded for almost-regular outputs.
    pub degree_ratio: Option<f64>,
    /// Witness map: output vertex `i` is host vertex `witness_vertices[i]`.
    pub witness_vertices: Option<Vec<u32>>,
    /// Where the subgraph (or other artifact) was written, if anywhere.
    pub output_path: Option<String>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, config: ConstantsConfig) -> RunReport {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            method: None,
            r: None,
            seed,
            config,
            input_path: None,
            input_sha256: None,
            stages: Vec::new(),
            verdict: String::new(),
            error: None,
            certified_regular: None,
            certified_almost_regular: None,
            degree_ratio: None,
            witness_vertices: None,
            output_path: None,
            wall_time_ms: 0,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Serializes `value` as pretty JSON with a trailing newline and writes it to
/// `path`. Field order follows struct declaration order, so identical values
/// produce byte-identical files.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
