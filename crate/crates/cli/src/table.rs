//! Typed result tables and their CSV/JSON serializations.

use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// IEEE-754 double, written with 17 significant digits.
    Float(f64),
    /// Integer.
    Int(i64),
    /// Free text (never contains separators in this tool's outputs).
    Text(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            // 1 + 16 digits in scientific notation round-trips any f64
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Float(v) if v.is_finite() => serde_json::json!(v),
            // JSON numbers cannot carry NaN/inf; encode as text
            Cell::Float(v) => serde_json::json!(v.to_string()),
            Cell::Int(v) => serde_json::json!(v),
            Cell::Text(v) => serde_json::json!(v),
        }
    }
}

/// Run provenance embedded in structured outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    /// Toolkit version.
    pub version: String,
    /// Effective seed after any command-line override.
    pub seed: u64,
    /// SHA-256 of the effective configuration (timestamp excluded).
    pub config_hash: String,
    /// Unix timestamp of the run, seconds.
    pub timestamp: u64,
}

/// Columnar result set with provenance.
#[derive(Debug, Clone)]
pub struct ResultTable {
    /// Suffix used when a scenario emits more than one table.
    pub name: String,
    /// Column names.
    pub columns: Vec<String>,
    /// Row-major cells; every row matches `columns` in length.
    pub rows: Vec<Vec<Cell>>,
    /// Run provenance.
    pub meta: Metadata,
}

impl ResultTable {
    /// CSV rendering: a header row plus data rows, no metadata block, so
    /// byte-identical reruns need only identical data.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// JSON rendering with the metadata block.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "metadata": self.meta,
            "name": self.name,
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// Write the table under `dir` as `<stem>.<ext>`, creating the directory.
    pub fn write(&self, dir: &Path, stem: &str, format: OutputFormat) -> std::io::Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)?;
        let (ext, body) = match format {
            OutputFormat::Csv => ("csv", self.to_csv()),
            OutputFormat::Json => (
                "json",
                format!("{:#}\n", self.to_json()),
            ),
        };
        let path = dir.join(format!("{stem}.{ext}"));
        std::fs::write(&path, body)?;
        Ok(path)
    }
}

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Comma-separated values, header row first.
    Csv,
    /// Single JSON document with metadata.
    Json,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata {
            version: "0.0.0".into(),
            seed: 7,
            config_hash: "deadbeef".into(),
            timestamp: 0,
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable {
            name: "t".into(),
            columns: vec!["a".into(), "b".into()],
            rows: vec![],
            meta: meta(),
        };
        assert_eq!(t.to_csv(), "a,b\n");
    }

    #[test]
    fn csv_floats_round_trip_bit_exactly() {
        let values = [
            1.0,
            -1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            6.02e23,
            f64::MIN_POSITIVE,
        ];
        let t = ResultTable {
            name: "t".into(),
            columns: vec!["v".into()],
            rows: values.iter().map(|&v| vec![Cell::Float(v)]).collect(),
            meta: meta(),
        };
        let csv = t.to_csv();
        for (line, &v) in csv.lines().skip(1).zip(&values) {
            let parsed: f64 = line.parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits(), "line {line}");
        }
    }

    #[test]
    fn json_contains_metadata_block() {
        let t = ResultTable {
            name: "t".into(),
            columns: vec!["v".into()],
            rows: vec![vec![Cell::Int(3)]],
            meta: meta(),
        };
        let j = t.to_json();
        assert_eq!(j["metadata"]["seed"], 7);
        assert_eq!(j["metadata"]["config_hash"], "deadbeef");
        assert_eq!(j["rows"][0][0], 3);
    }
}
