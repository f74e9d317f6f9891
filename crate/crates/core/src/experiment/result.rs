use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Duration;

use serde_json::{json, Map, Value};

use crate::Result;

pub const VERSION: &str = concat!("lerw-core ", env!("CARGO_PKG_VERSION"));

/// Reals are written with 17 significant digits so they round-trip exactly.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub config: BTreeMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub estimates: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
    /// Not part of the summary, which must be reproducible.
    pub wall_clock: Duration,
}

impl RunResult {
    pub(crate) fn new(config: BTreeMap<String, String>, header: &[&str]) -> Self {
        Self {
            config,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            estimates: Map::new(),
            diagnostics: Map::new(),
            wall_clock: Duration::ZERO,
        }
    }

    pub(crate) fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub(crate) fn estimate(&mut self, key: &str, value: impl Into<Value>) {
        self.estimates.insert(key.to_string(), value.into());
    }

    pub(crate) fn diagnostic(&mut self, key: &str, value: impl Into<Value>) {
        self.diagnostics.insert(key.to_string(), value.into());
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn summary(&self) -> Value {
        json!({
            "config": self.config,
            "estimates": self.estimates,
            "diagnostics": self.diagnostics,
            "version": VERSION,
        })
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary())? + "\n")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    pub fn write_summary(&self, path: &Path) -> Result<()> {
        fs::write(path, self.summary_json()?)?;
        Ok(())
    }
}
