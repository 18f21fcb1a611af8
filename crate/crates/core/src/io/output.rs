//! Deterministic CSV output and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::io::config::render_config;
use crate::units::PhysicalParams;

/// Round-trip formatting: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV with LF line endings and round-trip float fields.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt_f64(x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one command invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub params: PhysicalParams,
    pub options: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub version: String,
    pub duration: Duration,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(command: &str, params: &PhysicalParams, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            params: *params,
            options: Vec::new(),
            seed,
            version: concat!("corremit ", env!("CARGO_PKG_VERSION")).to_string(),
            duration: Duration::ZERO,
            outputs: Vec::new(),
        }
    }

    pub fn option(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.options.push((key.to_string(), value.to_string()));
        self
    }

    /// Hashes `path` and records it as an output.
    pub fn record(&mut self, path: &Path) -> Result<()> {
        let sha256 = sha256_file(path)?;
        self.outputs.push(OutputFile {
            path: path.to_path_buf(),
            sha256,
        });
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "version = {}", self.version);
        match self.seed {
            Some(seed) => {
                let _ = writeln!(s, "seed = {seed}");
            }
            None => s.push_str("seed = none\n"),
        }
        s.push_str(&render_config(&self.params));
        for (k, v) in &self.options {
            let _ = writeln!(s, "option.{k} = {v}");
        }
        let _ = writeln!(s, "duration_s = {:.3}", self.duration.as_secs_f64());
        for o in &self.outputs {
            let name = o.path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
            let _ = writeln!(s, "output = {name} sha256={}", o.sha256);
        }
        s
    }

    /// Writes the manifest text to `dir/name`.
    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        let path = dir.join(name);
        fs::write(&path, self.render())?;
        Ok(path)
    }
}
