//! CSV and JSON artifact writers.  Floats are emitted with 17 significant
//! digits so downstream plotting round-trips the exact values; identical
//! configs and seeds produce byte-identical files.

use crate::error::Result;
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits, scientific.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV cell: either a float or a plain string.
#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

pub fn write_csv<R>(path: &Path, header: &[&str], rows: R) -> Result<()>
where
    R: IntoIterator<Item = Vec<Cell>>,
{
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            first = false;
            match cell {
                Cell::F(v) => {
                    let _ = write!(out, "{}", format_float(v));
                }
                Cell::S(s) => out.push_str(&s),
            }
        }
        out.push('\n');
    }
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let text = serde_json::to_string_pretty(value).expect("report serialization");
    std::fs::write(path, text)?;
    Ok(())
}
