use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

/// Everything needed to reproduce a command's outputs. The timestamp lives
/// here and nowhere else.
#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub config: Value,
    pub seed: u64,
    pub version: &'static str,
    pub outputs: Vec<PathBuf>,
    pub created_unix: u64,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, config: Value, seed: u64, outputs: Vec<PathBuf>) -> Self {
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self { subcommand, config, seed, version: env!("CARGO_PKG_VERSION"), outputs, created_unix }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
