//! CSV tables with a `#` metadata block, written atomically.

use std::io::Write;
use std::path::Path;

use crate::error::CliResult;

/// Full-precision decimal rendering: 17 significant digits, round-trips exactly.
pub fn num(x: f64) -> String {
    // no negative zero in tables
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub struct Table {
    meta: Vec<(String, String)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { meta: Vec::new(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.to_string(), value.into()));
    }

    /// Puts `pairs` ahead of any metadata already recorded.
    pub fn prepend_meta(&mut self, mut pairs: Vec<(String, String)>) {
        pairs.append(&mut self.meta);
        self.meta = pairs;
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> CliResult<Vec<u8>> {
        let mut out = Vec::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k} = {v}")?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
    }
}

/// Writes `bytes` to `path` via a sibling temporary file, or to stdout when
/// no path is given. A failed write leaves no partial file behind.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> CliResult<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(p) => write_atomic(p, bytes)?,
    }
    Ok(())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    let result = std::fs::write(&tmp, bytes).and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
