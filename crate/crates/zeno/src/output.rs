//! CSV and report writers.
//!
//! Every CSV starts with `#` header lines (tool version, mode, config hash,
//! seed, samples) followed by a column row and the data. Nothing in the file
//! depends on the clock or the worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{ensure, Context, Result};

use crate::config::Mode;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub mode: Mode,
    pub config_sha256: String,
    pub seed: u64,
    pub samples: usize,
}

impl Header {
    pub fn lines(&self) -> String {
        format!(
            "# zeno {VERSION}\n# mode: {}\n# config_sha256: {}\n# seed: {}\n# samples: {}\n",
            self.mode, self.config_sha256, self.seed, self.samples
        )
    }
}

/// Nine significant digits, fixed exponent form.
pub fn float(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

#[derive(Debug, Clone)]
pub struct Csv {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) -> Result<()> {
        ensure!(row.len() == self.columns.len(), "row has {} fields, expected {}", row.len(), self.columns.len());
        ensure!(row.iter().all(|f| !f.contains([',', '\n', '"'])), "CSV field needs quoting: {row:?}");
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column row and data, without the header block.
    pub fn body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, header: &Header) -> String {
        header.lines() + &self.body()
    }

    pub fn write(&self, path: &Path, header: &Header) -> Result<()> {
        fs::write(path, self.render(header)).with_context(|| format!("writing {}", path.display()))
    }
}

/// Strips `#` header lines, leaving what must be identical across reruns.
pub fn csv_body(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with('#') {
        rest = rest.split_once('\n').map_or("", |(_, tail)| tail);
    }
    rest
}

/// Flat JSON object with string values, keys in the given order.
pub fn flat_json(pairs: &[(String, String)]) -> String {
    let mut out = String::from("{\n");
    for (k, (key, value)) in pairs.iter().enumerate() {
        let sep = if k + 1 == pairs.len() { "" } else { "," };
        let _ = writeln!(out, "  {}: {}{sep}", serde_json::Value::from(key.as_str()), serde_json::Value::from(value.as_str()));
    }
    out.push_str("}\n");
    out
}
