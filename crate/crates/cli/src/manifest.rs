//! Run manifests: the parameters of a run plus checksums of everything it
//! produced, so that a rerun can be checked byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, minus `--out` and `--manifest`.
    pub args: Vec<String>,
    pub params: Value,
    pub seed: Option<u64>,
    /// Random generator used when `seed` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
    /// Artifact name to SHA-256 hex digest.
    pub checksums: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Artifacts a report produces, by file name.
pub fn artifacts(report: &Report) -> Vec<(String, String)> {
    let mut out = vec![(format!("{}.json", report.name), result_json(report))];
    if let Some(csv) = &report.csv {
        out.push((format!("{}.csv", report.name), csv.clone()));
    }
    out.extend(report.files.iter().cloned());
    out
}

pub fn result_json(report: &Report) -> String {
    serde_json::to_string_pretty(&report.json).expect("json values serialize")
}

pub fn checksums(report: &Report) -> BTreeMap<String, String> {
    artifacts(report).into_iter().map(|(name, body)| (name, sha256_hex(body.as_bytes()))).collect()
}

/// Drops flags that only choose where output goes.
pub fn replayable_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip_next = false;
    for a in args {
        if skip_next {
            skip_next = false;
            continue;
        }
        if a == "--out" || a == "--manifest" {
            skip_next = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--manifest=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn strips_output_flags() {
        let args: Vec<String> = ["factor", "--N", "15", "--out", "d", "--manifest=m.json", "--seed", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(replayable_args(&args), ["factor", "--N", "15", "--seed", "1"]);
    }
}
