use std::path::{Path, PathBuf};

use mflangevin::{Config, Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Written next to the outputs before the computation starts.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the canonical resolved configuration.
    pub config_digest: String,
    pub seed: u64,
    pub tool_version: String,
    pub output_paths: Vec<String>,
    pub resolved_config: String,
}

impl RunManifest {
    pub fn new(command: &str, config: &Config, outputs: &[PathBuf]) -> Result<Self> {
        let canonical = config.canonical();
        Ok(Self {
            command: command.to_string(),
            config_digest: hex::encode(Sha256::digest(canonical.as_bytes())),
            seed: config.get("seed", 0u64)?,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            output_paths: outputs.iter().map(|p| p.display().to_string()).collect(),
            resolved_config: canonical,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    write_text(path, &(text + "\n"))
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// `dir/stem_suffix` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}"))
}
