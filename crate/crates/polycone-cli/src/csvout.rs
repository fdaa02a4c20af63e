//! Minimal CSV output.  All values are plain numbers or short enum
//! strings, so no quoting is needed; complex quantities are emitted as
//! re/im column pairs.

use std::io::Write;
use std::path::Path;

/// In-memory CSV table.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, path: &Path) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()
    }
}

/// Compact float cell that round-trips through `f64::from_str`
/// (infinities render as `inf`).
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
