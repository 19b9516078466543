//! Report formats and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// 17 significant digits, enough to round-trip an `f64`.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".into()
    }
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), float)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn unix_seconds() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub tool_version: String,
    pub started_at: u64,
    pub finished_at: u64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config_bytes: &[u8], seed: u64) -> Self {
        Self {
            command: command.into(),
            config_digest: sha256_hex(config_bytes),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_at: unix_seconds(),
            finished_at: 0,
            outputs: Vec::new(),
        }
    }
}

/// Collects written files for the manifest.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        fs::write(&path, contents)?;
        self.written.push(name.into());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(mut self, stem: &str, mut manifest: RunManifest) -> Result<(), CliError> {
        manifest.outputs = std::mem::take(&mut self.written);
        manifest.finished_at = unix_seconds();
        self.write_json(&format!("{stem}.manifest.json"), &manifest)?;
        Ok(())
    }
}
