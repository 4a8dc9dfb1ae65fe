//! Deterministic report files: same config and seed, byte-identical output.
//! Every file embeds the schema version, tool version, seed and config hash.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

pub fn config_hash(raw: &str) -> String {
    let mut h = Sha256::new();
    h.update(raw.as_bytes());
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct OutputMeta {
    pub seed: u64,
    pub config_sha256: String,
}

impl OutputMeta {
    pub fn csv_comment(&self) -> String {
        format!(
            "# schema_version={} tool_version={} seed={} config_sha256={}",
            SCHEMA_VERSION,
            tool_version(),
            self.seed,
            self.config_sha256
        )
    }

    pub fn json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "tool_version": tool_version(),
            "seed": self.seed,
            "config_sha256": self.config_sha256,
        })
    }
}

pub fn write_csv(dir: &Path, name: &str, meta: &OutputMeta, header: &str, rows: &[String]) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut body = String::new();
    body.push_str(&meta.csv_comment());
    body.push('\n');
    body.push_str(header);
    body.push('\n');
    for r in rows {
        body.push_str(r);
        body.push('\n');
    }
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(path)
}

pub fn write_json(dir: &Path, name: &str, meta: &OutputMeta, payload: serde_json::Value) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut root = meta.json_value();
    if let (Some(obj), Some(extra)) = (root.as_object_mut(), payload.as_object()) {
        for (k, v) in extra {
            obj.insert(k.clone(), v.clone());
        }
    }
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(&root).unwrap() + "\n")?;
    Ok(path)
}
