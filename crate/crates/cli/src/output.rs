//! CSV emission for report series.
//!
//! Numbers are written as shortest round-trip decimals (Rust's default
//! float formatting), so emitting and re-parsing a table reproduces the
//! in-memory values bit for bit, and identical runs produce byte-identical
//! files.

use sbd_core::error::{Error, Result};

/// One table: a header and rows of already-formatted cells.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Formats a float as its shortest round-trip decimal.
pub fn decimal(v: f64) -> String {
    format!("{v}")
}

/// Renders a table as headered CSV. An empty series is an error and
/// nothing is written.
pub fn emit_plot_data(table: &Table) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out = table.header.join(",");
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}
