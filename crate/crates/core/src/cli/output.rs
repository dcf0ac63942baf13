//! Deterministic CSV and JSON emitters.
//!
//! CSV floats are written with `{:.16e}` (17 significant digits), which
//! parses back to the identical `f64`. JSON floats use the shortest
//! representation that round-trips. Configuration is echoed into CSV as
//! leading `#` comment lines holding compact JSON.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV document: comment lines, a header and string rows.
#[derive(Debug, Default)]
pub(crate) struct CsvDoc {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            ..Self::default()
        }
    }

    pub fn comment_json<T: Serialize>(&mut self, key: &str, value: &T) -> Result<(), CliError> {
        let json = serde_json::to_string(value).map_err(|e| CliError::Usage(e.to_string()))?;
        self.comments.push(format!("{key}: {json}"));
        Ok(())
    }

    /// Column-major numeric table.
    pub fn from_columns(header: Vec<String>, columns: &[&[f64]]) -> Self {
        let n = columns.iter().map(|c| c.len()).max().unwrap_or(0);
        let rows = (0..n)
            .map(|i| {
                columns
                    .iter()
                    .map(|c| c.get(i).map_or_else(String::new, |v| fmt_f64(*v)))
                    .collect()
            })
            .collect();
        Self {
            header,
            rows,
            ..Self::default()
        }
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        for c in &self.comments {
            buf.extend_from_slice(b"# ");
            buf.extend_from_slice(c.as_bytes());
            buf.push(b'\n');
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(buf);
        let csv_err = |e: csv::Error| CliError::Usage(e.to_string());
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
    }
}

pub(crate) fn render_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut buf = serde_json::to_vec_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    buf.push(b'\n');
    Ok(buf)
}

/// Writes to `path`, or to `stdout` when no path is given.
pub(crate) fn emit(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, bytes),
        None => stdout.write_all(bytes).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads one numeric column (by name, else the first) from a CSV file,
/// skipping `#` comment lines.
pub(crate) fn read_column(path: &Path, name: &str) -> Result<Vec<f64>, CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let text = fs::read_to_string(path).map_err(io_err)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let idx = headers.iter().position(|h| h == name).unwrap_or(0);
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| bad(e.to_string()))?;
            let field = r.get(idx).unwrap_or("");
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("`{field}` is not a number")))
        })
        .collect()
}
