//! Table writers and readers.
//!
//! CSV files start with `# config: {json}` (and optionally `# meta: {json}`),
//! then a header row. JSON files hold `{config, meta, columns, rows}`.
//! Files are written to a sibling temporary and renamed into place.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Format;

/// A numeric table with named columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .with_context(|| format!("missing column '{name}'"))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    config: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

pub fn write_table(path: &Path, format: Format, config: &Value, meta: Option<&Value>, table: &Table) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("--out: cannot write in {}", dir.display()))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        match format {
            Format::Csv => {
                writeln!(w, "# config: {}", serde_json::to_string(config)?)?;
                if let Some(meta) = meta {
                    writeln!(w, "# meta: {}", serde_json::to_string(meta)?)?;
                }
                let mut csv = csv::Writer::from_writer(&mut w);
                csv.write_record(&table.columns)?;
                for row in &table.rows {
                    csv.write_record(row.iter().map(|v| format!("{v:?}")))?;
                }
                csv.flush()?;
            }
            Format::Json => {
                let doc = JsonDocument {
                    config: config.clone(),
                    meta: meta.cloned(),
                    columns: table.columns.clone(),
                    rows: table.rows.clone(),
                };
                serde_json::to_writer(&mut w, &doc)?;
                writeln!(w)?;
            }
        }
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("--out: cannot create {}", path.display()))?;
    Ok(())
}

/// Reads a table written by [`write_table`], detecting the format from content.
pub fn read_table(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let doc: JsonDocument = serde_json::from_str(&text).with_context(|| format!("{}: invalid json", path.display()))?;
        return Ok(Table { columns: doc.columns, rows: doc.rows });
    }
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("{}: bad number on data row {}", path.display(), line + 1))?;
        if row.len() != columns.len() {
            bail!("{}: row {} has {} fields, expected {}", path.display(), line + 1, row.len(), columns.len());
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}
