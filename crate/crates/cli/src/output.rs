//! CSV, plot-description and manifest writers.
//!
//! Floats use `{:.16e}` (17 significant digits) so output is byte-identical
//! for identical inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Float(v) => format_float(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) => {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
    }
}

/// A table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Key/value summary table.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    rows: Vec<(String, Cell)>,
}

impl Summary {
    pub fn add(&mut self, key: impl Into<String>, value: impl Into<Cell>) -> &mut Self {
        self.rows.push((key.into(), value.into()));
        self
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["key", "value"]);
        for (k, v) in &self.rows {
            t.push(vec![Cell::Text(k.clone()), v.clone()]);
        }
        t
    }
}

/// Column mapping and axis labels for one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub x: &'static str,
    pub y: Vec<&'static str>,
    pub x_label: String,
    pub y_label: String,
    pub log_axes: bool,
}

impl Plot {
    pub fn new(x: &'static str, y: &[&'static str], x_label: &str, y_label: &str) -> Self {
        Self {
            x,
            y: y.to_vec(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            log_axes: false,
        }
    }

    pub fn log(mut self) -> Self {
        self.log_axes = true;
        self
    }

    fn render(&self, data: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "data = {data}");
        let _ = writeln!(out, "x = {}", self.x);
        let _ = writeln!(out, "y = {}", self.y.join(","));
        let _ = writeln!(out, "xlabel = {}", self.x_label);
        let _ = writeln!(out, "ylabel = {}", self.y_label);
        let _ = writeln!(out, "scale = {}", if self.log_axes { "loglog" } else { "linear" });
        out
    }
}

/// Collects the files of one run under its output directory.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.written
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Writes `name.csv` and, when given, `name.plot`.
    pub fn write_table(&mut self, name: &str, table: &Table, plot: Option<Plot>) -> Result<()> {
        let csv = format!("{name}.csv");
        self.write_text(&csv, &table.to_csv())?;
        if let Some(plot) = plot {
            self.write_text(&format!("{name}.plot"), &plot.render(&csv))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
        let parsed: f64 = format_float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(parsed, std::f64::consts::PI);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![1usize.into(), true.into(), "x,y".into()]);
        assert_eq!(t.to_csv(), "a,b,c\n1,true,\"x,y\"\n");
    }
}
