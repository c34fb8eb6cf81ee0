use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use depthwork::presentation::Budgets;

/// Record of one invocation. Everything except `wall_ms` is a function of
/// the invocation, so re-running it reproduces `output_sha256`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub budgets: Option<Budgets>,
    pub budget_mb: Option<u64>,
    pub tool_version: &'static str,
    pub wall_ms: u128,
    pub summary: String,
    pub exit_code: i32,
    pub output_sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
