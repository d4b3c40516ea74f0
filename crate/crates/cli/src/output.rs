//! Deterministic CSV and manifest writing: fixed column order, fixed float
//! formatting (17 significant digits), rows in grid order regardless of how
//! many workers produced them.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// A rectangular all-numeric table with named columns.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_csv(path: &Path, table: &Table) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&table.headers.join(","));
    out.push('\n');
    for row in &table.rows {
        debug_assert_eq!(row.len(), table.headers.len());
        let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())
}

/// Flat key -> number/string map echoed alongside every run so no default
/// stays silent. BTreeMap keeps the serialization order stable.
#[derive(Default)]
pub struct Manifest {
    entries: BTreeMap<String, toml::Value>,
}

impl Manifest {
    pub fn new(scenario: &str) -> Self {
        let mut m = Manifest::default();
        m.set_str("scenario", scenario);
        m.set_str("tool", "blockade");
        m.set_str("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.entries
            .insert(key.to_string(), toml::Value::Float(value));
    }

    pub fn set_int(&mut self, key: &str, value: i64) {
        self.entries
            .insert(key.to_string(), toml::Value::Integer(value));
    }

    pub fn set_str(&mut self, key: &str, value: &str) {
        self.entries
            .insert(key.to_string(), toml::Value::String(value.to_string()));
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        fs::write(path, out)
    }
}

/// `foo.csv -> foo.manifest.toml`
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.toml")
}

/// `foo.csv -> foo_<suffix>.csv`
pub fn side_table_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}
