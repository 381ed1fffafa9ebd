//! Experiment records and the JSON-lines log they are appended to.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Bumped whenever the record layout changes incompatibly.
pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema: u32,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, enough to replay the run.
    pub argv: Vec<String>,
    pub body_hash: Option<String>,
    pub parameters: Value,
    pub seed: u64,
    pub timestamp: String,
    /// `true` unless a mathematical assertion failed.
    pub pass: bool,
    pub result: Value,
}

/// Content digest of a body description: SHA-256 over git's blob framing
/// `"blob <len>\0<bytes>"` of the canonical JSON.
pub fn content_hash(canonical: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", canonical.len()).as_bytes());
    h.update(canonical.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Appends one line with a single `write` on an `O_APPEND` handle, so
/// concurrent writers never interleave within a record.
pub fn append(path: &Path, record: &ExperimentRecord) -> std::io::Result<()> {
    let mut line = serde_json::to_string(record).expect("serializable record");
    line.push('\n');
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(line.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_matches_git_blob_framing() {
        // `printf 'hello\n' | git hash-object --stdin` framing, hashed with SHA-256
        // (as `git hash-object` does in a sha256 repository).
        assert_eq!(content_hash("hello\n"), "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4");
    }
}
