//! Run manifests: what was run, with which seeds, and the hash of every
//! file it wrote.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: serde_json::Value,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Deletes `root/manifest.json` if present.
pub fn remove_stale(root: &Path) -> CliResult<()> {
    let old = root.join(MANIFEST_NAME);
    if old.exists() {
        std::fs::remove_file(&old).map_err(|e| CliError::io(&old, e))?;
    }
    Ok(())
}

/// Collects the files of one run and writes them out.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    /// Creates `root` if needed and drops any manifest left by an earlier
    /// run, so a failed run never leaves one behind.
    pub fn create(root: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        remove_stale(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `bytes` to `rel` under the root and records its hash.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.retain(|f| f.path != rel);
        self.files.push(FileEntry {
            path: rel.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    /// Writes the manifest last, through a temporary file and a rename.
    pub fn finish(self, command: &str, config: serde_json::Value, seeds: serde_json::Value) -> CliResult<Manifest> {
        let manifest = Manifest {
            tool: "qgsynth".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            seeds,
            files: self.files,
        };
        let body = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::invalid(e.to_string()))?;
        let tmp = self.root.join(format!("{MANIFEST_NAME}.tmp"));
        let dst = self.root.join(MANIFEST_NAME);
        std::fs::write(&tmp, &body).map_err(|e| CliError::io(&tmp, e))?;
        std::fs::rename(&tmp, &dst).map_err(|e| CliError::io(&dst, e))?;
        Ok(manifest)
    }
}

pub fn read_manifest(dir: &Path) -> CliResult<Manifest> {
    let path = dir.join(MANIFEST_NAME);
    let text = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_slice(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}
