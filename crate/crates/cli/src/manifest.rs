//! Run manifests: what was run, when, and a content hash of every output.
//!
//! Each output file gets a git-blob-style digest
//! `sha256("blob " + len + "\0" + bytes)`; the manifest's combined
//! `content_hash` is the sha256 of the newline-joined `name + " " + digest`
//! lines sorted by name. Any changed output byte changes the combined
//! hash; timestamps and tool version do not enter it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::HarnessError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputRecord {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// Canonical text of the spec that produced the outputs.
    pub spec: String,
    pub master_seed: u64,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<OutputRecord>,
    pub content_hash: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Git-style blob digest of raw bytes.
pub fn blob_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", bytes.len()).as_bytes());
    hasher.update(bytes);
    hex(&hasher.finalize())
}

fn combined_hash(outputs: &[OutputRecord]) -> String {
    let mut lines: Vec<String> = outputs
        .iter()
        .map(|o| format!("{} {}", o.name, o.sha256))
        .collect();
    lines.sort();
    let mut hasher = Sha256::new();
    hasher.update(lines.join("\n").as_bytes());
    hex(&hasher.finalize())
}

/// UTC timestamp for manifest bookkeeping.
pub fn timestamp_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Hashes the given output files (paths relative names taken from the
/// file names) and assembles the manifest.
pub fn build_manifest(
    spec_text: &str,
    master_seed: u64,
    started: String,
    output_paths: &[PathBuf],
) -> Result<RunManifest, HarnessError> {
    let mut outputs = Vec::with_capacity(output_paths.len());
    for path in output_paths {
        let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        outputs.push(OutputRecord {
            name,
            bytes: bytes.len() as u64,
            sha256: blob_digest(&bytes),
        });
    }
    outputs.sort_by(|a, b| a.name.cmp(&b.name));
    let content_hash = combined_hash(&outputs);
    Ok(RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec_text.to_string(),
        master_seed,
        started,
        finished: timestamp_now(),
        outputs,
        content_hash,
    })
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<(), HarnessError> {
    let json =
        serde_json::to_string_pretty(manifest).map_err(|e| HarnessError::Other(e.to_string()))?;
    std::fs::write(path, json + "\n").map_err(|e| HarnessError::io(path, e))
}
