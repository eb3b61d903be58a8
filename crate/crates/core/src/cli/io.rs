//! Count-file parsing, CSV formatting and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::FrequencyData;

/// Locale-independent shortest round-trip representation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Parses whitespace- or newline-separated nonnegative integer counts.
///
/// Lines starting with `#` are ignored. Returns the data and the number of
/// trailing zero counts that were dropped.
pub fn parse_counts(text: &str) -> Result<(FrequencyData, usize)> {
    let mut counts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: u64 = tok.parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("`{tok}` is not a nonnegative integer count"),
            })?;
            counts.push(v);
        }
    }
    if counts.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            msg: "no counts found".into(),
        });
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            msg: "all counts are zero".into(),
        });
    }
    FrequencyData::from_counts_trimmed(counts)
}

pub fn read_counts(path: &Path) -> Result<(FrequencyData, usize)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_counts(&text)
}

/// Minimal CSV builder; values are written verbatim.
#[derive(Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.buf, "# {key}={value}");
        self
    }

    pub fn row<I, S>(&mut self, fields: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(f.as_ref());
            first = false;
        }
        self.buf.push('\n');
        self
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// Everything needed to re-derive a run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Command-line arguments after the program name.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub artifacts: Vec<String>,
    pub tool_version: String,
    pub seed: u64,
}

/// Collects output files for one command and writes them plus the manifest.
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn finish(
        mut self,
        command: &str,
        args: &[String],
        config: serde_json::Value,
        seed: u64,
    ) -> std::io::Result<Vec<PathBuf>> {
        let manifest = RunManifest {
            command: command.to_string(),
            args: args.to_vec(),
            config,
            artifacts: self.written.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let name = format!("{command}.manifest.json");
        self.write(&name, &(json + "\n"))?;
        Ok(self.written.iter().map(|w| self.dir.join(w)).collect())
    }
}
