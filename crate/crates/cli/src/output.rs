//! CSV tables with a schema-versioned header, and JSON summaries.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// One CSV file. Every row starts with the schema tag and the shape string.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub command: String,
    pub shape: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: &str, shape: &str, columns: &[&str]) -> Self {
        Self { command: command.into(), shape: shape.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn schema(&self) -> String {
        format!("nilweyl/{}/v{SCHEMA_VERSION}", self.command)
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["schema".to_string(), "shape".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        let schema = self.schema();
        for row in &self.rows {
            w.write_record([schema.as_str(), self.shape.as_str()].into_iter().chain(row.iter().map(String::as_str)))?;
        }
        w.into_inner().map_err(|e| anyhow::anyhow!("flushing CSV: {e}"))
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

/// Shortest round-trip decimal form, so identical values print identically.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`, returning both paths.
pub fn write_outputs<S: Serialize>(dir: &Path, stem: &str, table: &Table, summary: &S) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    std::fs::write(&csv_path, table.to_bytes()?).with_context(|| format!("writing {}", csv_path.display()))?;
    let json = serde_json::to_string_pretty(summary)?;
    std::fs::write(&json_path, json + "\n").with_context(|| format!("writing {}", json_path.display()))?;
    Ok((csv_path, json_path))
}
