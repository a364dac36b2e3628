use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use monotone_lab::experiments::ExperimentConfig;

use crate::CliError;

/// Writes `contents` to a temporary file beside `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// SHA-256 (hex) of the fully resolved config, serialized with sorted keys.
/// Key order and omitted defaults in the source file do not affect it.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let value = toml::Value::try_from(cfg).expect("config serializes to TOML");
    let canonical = toml::to_string(&value).expect("TOML value serializes");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: Option<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub duration_s: f64,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config_hash: Option<String>,
        seed: Option<u64>,
        outputs: &[PathBuf],
        elapsed: Duration,
    ) -> Self {
        Self {
            command: command.to_string(),
            config_hash,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            duration_s: elapsed.as_secs_f64(),
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write_beside(&self, output: &Path) -> Result<PathBuf, CliError> {
        let path = Self::path_for(output);
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        write_atomic(&path, json.as_bytes())?;
        Ok(path)
    }
}
