//! Structured run reports. Identical (command, inputs, seed) triples produce
//! identical results; timing is emitted only on request so that fixed-seed
//! reports compare byte-for-byte.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub results: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn digest_of(path: &str, bytes: &[u8]) -> InputDigest {
    let mut h = Sha256::new();
    h.update(bytes);
    InputDigest {
        path: path.to_string(),
        sha256: format!("{:x}", h.finalize()),
    }
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Vec::new(),
            results: serde_json::Value::Null,
            seed: None,
            timing_ms: None,
        }
    }

    pub fn print(&self) {
        println!("{}", serde_json::to_string_pretty(self).expect("report serializes"));
    }
}
