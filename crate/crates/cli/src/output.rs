//! CSV writers and run manifests.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Round-trip exact float formatting (17 significant digits).
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `out.csv` → `out.csv.<suffix>`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

/// Fails unless every path is free or `force` is set.
pub fn ensure_writable(paths: &[PathBuf], force: bool) -> CliResult<()> {
    if force {
        return Ok(());
    }
    match paths.iter().find(|p| p.exists()) {
        Some(p) => Err(CliError::Io(format!(
            "{} exists; pass --force to overwrite",
            p.display()
        ))),
        None => Ok(()),
    }
}

/// CSV file with a fixed header row.
pub struct CsvWriter {
    path: PathBuf,
    inner: csv::Writer<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> CliResult<Self> {
        let file = File::create(path)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        let mut w = Self {
            path: path.to_path_buf(),
            inner: csv::Writer::from_writer(file),
        };
        w.row(header)?;
        Ok(w)
    }

    pub fn row<S: AsRef<[u8]>>(&mut self, fields: &[S]) -> CliResult<()> {
        self.inner
            .write_record(fields)
            .map_err(|e| self.io_error(e))
    }

    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.inner.flush().map_err(|e| self.io_error(e))?;
        Ok(self.path)
    }

    fn io_error(&self, e: impl std::fmt::Display) -> CliError {
        CliError::Io(format!("writing {}: {e}", self.path.display()))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<PathBuf> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serializing {}: {e}", path.display())))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Sidecar describing one run: resolved inputs, their hash, and the outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    /// SHA-256 of the canonical JSON of `command` and `parameters`.
    pub input_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub threads: usize,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<OutputFile>,
}

/// Collects the resolved inputs of a run before it starts.
pub struct ManifestBuilder {
    command: String,
    parameters: serde_json::Value,
    seed: u64,
    started: SystemTime,
}

impl ManifestBuilder {
    pub fn new<P: Serialize>(command: &str, parameters: &P, seed: u64) -> CliResult<Self> {
        let parameters = serde_json::to_value(parameters)
            .map_err(|e| CliError::Usage(format!("unserializable parameters: {e}")))?;
        Ok(Self {
            command: command.to_string(),
            parameters,
            seed,
            started: SystemTime::now(),
        })
    }

    pub fn input_hash(&self) -> String {
        // map keys are sorted, so the serialization is canonical
        let canonical =
            serde_json::json!({ "command": self.command, "parameters": self.parameters });
        sha256_hex(canonical.to_string().as_bytes())
    }

    /// Hashes the outputs and writes the manifest next to `primary`.
    pub fn finish(self, primary: &Path, outputs: &[PathBuf]) -> CliResult<PathBuf> {
        let outputs = outputs
            .iter()
            .map(|p| {
                let bytes = std::fs::read(p)
                    .map_err(|e| CliError::Io(format!("cannot read back {}: {e}", p.display())))?;
                Ok(OutputFile {
                    path: p.display().to_string(),
                    sha256: sha256_hex(&bytes),
                    bytes: bytes.len() as u64,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        let manifest = RunManifest {
            input_hash: self.input_hash(),
            command: self.command,
            parameters: self.parameters,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            started_unix: unix_seconds(self.started),
            finished_unix: unix_seconds(SystemTime::now()),
            outputs,
        };
        write_json(&sidecar(primary, "manifest.json"), &manifest)
    }
}
