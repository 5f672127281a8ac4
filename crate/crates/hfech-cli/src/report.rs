//! The report file format: versioned JSON whose content is a pure
//! function of the engine version, the input digest, and the parameters
//! (timing aside).

use serde::{Deserialize, Serialize};

pub const REPORT_FORMAT: &str = "hfech-report/1";
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupLine {
    pub row: String,
    pub grading: i64,
    /// Rendered group, e.g. "Z^2 + Z/2".
    pub group: String,
    pub rank: usize,
    /// Torsion divisors as decimal strings.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VerdictLine {
    pub statement: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportDocument {
    pub format: String,
    pub engine: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    /// Flag/value pairs, sorted by flag name.
    pub parameters: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupLine>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<VerdictLine>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stabilization: Vec<String>,
    /// Wall-clock milliseconds; the only field allowed to differ between
    /// reruns with identical inputs.
    pub timing_ms: u64,
}

impl ReportDocument {
    pub fn new(command: &str) -> ReportDocument {
        ReportDocument {
            format: REPORT_FORMAT.to_string(),
            engine: ENGINE_VERSION.to_string(),
            command: command.to_string(),
            input_digest: None,
            parameters: Vec::new(),
            groups: Vec::new(),
            verdicts: Vec::new(),
            stabilization: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn param(&mut self, k: &str, v: impl std::fmt::Display) {
        self.parameters.push((k.to_string(), v.to_string()));
        self.parameters.sort();
    }

    pub fn to_pretty_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<ReportDocument, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The document with timing erased, for determinism comparisons.
    pub fn canonical(&self) -> ReportDocument {
        let mut c = self.clone();
        c.timing_ms = 0;
        c
    }
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(bytes);
    format!("sha256:{:x}", h.finalize())
}
