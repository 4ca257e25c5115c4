use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExperimentConfig;
use crate::error::{Error, Result};

/// Every seed an experiment consumed, derived from the master seed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub master: u64,
    pub split: Option<u64>,
    pub probe: Option<u64>,
    pub bootstrap: Vec<u64>,
    pub learner_init: Vec<u64>,
    pub single_init: Option<u64>,
    pub trials: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub seeds: SeedRecord,
    pub outputs: Vec<OutputFile>,
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Serialize `rows` under `header`, write `dir/name`, and describe the file.
pub(crate) fn write_csv(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<OutputFile> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io(dir.join(name), e.into_error()))?;
    write_bytes(dir, name, &bytes)
}

pub(crate) fn write_bytes(dir: &Path, name: &str, bytes: &[u8]) -> Result<OutputFile> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(OutputFile {
        file: name.to_string(),
        bytes: bytes.len(),
        sha256: sha256_hex(bytes),
    })
}

impl Manifest {
    pub fn new(
        experiment: &str,
        config: &ExperimentConfig,
        seeds: SeedRecord,
        outputs: Vec<OutputFile>,
    ) -> Self {
        Self {
            tool: "qel".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: experiment.into(),
            config: config.clone(),
            seeds,
            outputs,
        }
    }

    /// Writes `dir/<experiment>.manifest.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_bytes(
            dir,
            &format!("{}.manifest.json", self.experiment),
            text.as_bytes(),
        )
        .map(|_| ())
    }
}
