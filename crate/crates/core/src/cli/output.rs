//! Artifact writers. Every file starts with a provenance record.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes CSV and JSON artifacts into one directory, tagged with the
/// config hash.
#[derive(Debug, Clone)]
pub struct Artifacts {
    dir: PathBuf,
    config_hash: String,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path, config_hash: String) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            config_hash,
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn provenance(&self) -> Value {
        json!({ "tool": "hyperbif", "version": VERSION, "config_sha256": self.config_hash })
    }

    /// `body` must start with the column header; a `#` comment line with the
    /// provenance goes above it.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        let text = format!("# hyperbif {VERSION} config_sha256={}\n{body}", self.config_hash);
        self.write(name, text)
    }

    /// `{"provenance": ..., "data": value}`, pretty-printed.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let doc = json!({ "provenance": self.provenance(), "data": value });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.write(name, text)
    }

    fn write(&mut self, name: &str, text: String) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, text)?;
        self.written.push(path.clone());
        Ok(path)
    }
}

/// Render rows as RFC-4180 CSV with a header line. Numbers carry 17
/// significant digits, enough to round-trip.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_values_round_trip() {
        let x = 0.1 + 0.2;
        let t = csv_table(&["a", "b"], [vec![x, -1.5e-300]]);
        let line = t.lines().nth(1).unwrap();
        let parsed: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(parsed, vec![x, -1.5e-300]);
    }

    #[test]
    fn files_carry_provenance() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::new(dir.path(), "abc".into()).unwrap();
        let p = a.csv("t.csv", "x\n1\n").unwrap();
        let text = std::fs::read_to_string(p).unwrap();
        assert!(text.starts_with(&format!("# hyperbif {VERSION} config_sha256=abc\nx\n")));
        let p = a.json("t.json", &[1, 2]).unwrap();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(v["provenance"]["config_sha256"], "abc");
        assert_eq!(v["data"], json!([1, 2]));
        assert_eq!(a.written().len(), 2);
    }
}
