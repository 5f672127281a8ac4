//! Result cache keyed on the engine version, the input digest, and every
//! parameter of the invocation.

use std::path::{Path, PathBuf};

use crate::report::{digest_bytes, ReportDocument, ENGINE_VERSION};

pub const CACHE_ENV: &str = "HFECH_CACHE_DIR";

pub fn cache_key(command: &str, input_digest: Option<&str>, params: &[(String, String)]) -> String {
    let mut blob = format!(
        "{ENGINE_VERSION}\n{command}\n{}\n",
        input_digest.unwrap_or("-")
    );
    let mut sorted = params.to_vec();
    sorted.sort();
    for (k, v) in sorted {
        blob.push_str(&format!("{k}={v}\n"));
    }
    digest_bytes(blob.as_bytes()).replace(':', "-")
}

pub fn lookup(dir: &Path, key: &str) -> Option<ReportDocument> {
    let path = dir.join(format!("{key}.json"));
    let text = std::fs::read_to_string(path).ok()?;
    ReportDocument::parse(&text).ok()
}

pub fn store(dir: &Path, key: &str, report: &ReportDocument) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{key}.json"));
    std::fs::write(&path, report.to_pretty_json())?;
    Ok(path)
}
