use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Written next to every primary output as `<out>.manifest.json`.
/// Carries no timestamps or host data, so reruns are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub tool_version: String,
}

fn digest(path: &Path) -> Result<FileDigest, CliError> {
    let bytes = fs::read(path).map_err(CliError::io(path))?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Collects outputs as they are written, then emits the manifest.
pub struct Run {
    command: &'static str,
    config: serde_json::Value,
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

impl Run {
    pub fn new(command: &'static str, config: serde_json::Value, seed: Option<u64>) -> Self {
        Run {
            command,
            config,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Replaces the recorded configuration once it is fully resolved.
    pub fn with_config(mut self, config: serde_json::Value, seed: Option<u64>) -> Self {
        self.config = config;
        self.seed = seed;
        self
    }

    /// Reads an input file and records it for the manifest.
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        self.inputs.push(path.to_path_buf());
        Ok(text)
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        fs::write(path, contents).map_err(CliError::io(path))?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    pub fn finish(self, primary: &Path) -> Result<(), CliError> {
        let manifest = RunManifest {
            command: self.command.to_string(),
            config: self.config,
            seed: self.seed,
            inputs: self.inputs.iter().map(|p| digest(p)).collect::<Result<_, _>>()?,
            outputs: self.outputs.iter().map(|p| digest(p)).collect::<Result<_, _>>()?,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let mut name = primary.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(CliError::io(&path))
    }
}

/// `out.json` -> `out.<suffix>`.
pub fn sibling(primary: &Path, suffix: &str) -> PathBuf {
    primary.with_extension(suffix)
}
