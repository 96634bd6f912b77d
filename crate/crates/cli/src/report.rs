use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Everything one invocation produced, in machine-readable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// The arguments after the program name.
    pub command: Vec<String>,
    /// SHA-256 of the input file or expression, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    pub seed: u64,
    pub payload: serde_json::Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn parse(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A rendered report: JSON plus a short human-readable summary.
pub struct Rendered {
    pub report: Report,
    pub text: String,
}
