//! CSV output: one `#` header line with the configuration, the table, then
//! `# key=value` lines for scalar results.

use std::io::Write;

use crate::config::ExperimentConfig;
use crate::{CliError, VERSION};

/// A pipeline result.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Scalar results written after the rows.
    pub trailing: Vec<(&'static str, String)>,
    /// Remarks for the error stream.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn trail(&mut self, key: &'static str, value: f64) {
        self.trailing.push((key, format_number(value)));
    }

    pub fn trail_text(&mut self, key: &'static str, value: &str) {
        self.trailing.push((key, value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn trailing_value(&self, key: &str) -> Option<&str> {
        self.trailing.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }
}

/// 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(mut out: W, config: &ExperimentConfig, table: &Table) -> Result<(), CliError> {
    writeln!(out, "# deltasink {VERSION} {}", config.describe())?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|&x| format_number(x)))?;
        }
        w.flush()?;
    }
    for (k, v) in &table.trailing {
        writeln!(out, "# {k}={v}")?;
    }
    out.flush()?;
    Ok(())
}
