use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use den_core::dataset::write_atomic;
use serde::Serialize;

/// Record of one command invocation and everything it wrote.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub config: serde_json::Value,
    pub dataset: Option<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub master_seed: Option<u64>,
    pub tool_version: &'static str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &'static str, config: serde_json::Value) -> Self {
        Self {
            command,
            config,
            dataset: None,
            outputs: Vec::new(),
            master_seed: None,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        write_atomic(path, serde_json::to_string_pretty(self)?.as_bytes())?;
        Ok(())
    }
}

/// `out.json` -> `out.manifest.json`.
pub fn sibling_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.manifest.json"))
}
