//! Delimited-text tables: a '#'-prefixed metadata preamble, a header row,
//! and numeric rows. Written atomically so partially written files never
//! appear under the output directory.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// One analysis result table.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl AsRef<str>) {
        self.metadata
            .push((key.to_string(), value.as_ref().to_string()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Render with a shared metadata preamble first, table-specific
    /// metadata after it.
    pub fn render(&self, common: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in common.iter().chain(self.metadata.iter()) {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Fixed-width scientific float formatting; deterministic across runs.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.17e}")
}

/// Write via a temporary sibling then rename into place.
pub fn write_atomic(dir: &Path, file_name: &str, content: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let target = dir.join(file_name);
    let tmp = dir.join(format!(".{file_name}.tmp"));
    fs::write(&tmp, content)?;
    fs::rename(&tmp, &target)?;
    Ok(target)
}
