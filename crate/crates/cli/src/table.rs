//! Column-major result tables and their CSV emission.
//!
//! CSV output is RFC-4180 style with LF line endings. Numbers are written
//! with 17 significant digits so that re-parsing reproduces the f64 values
//! bit-exactly; units ride in the header, e.g. `I_S [e*Gamma0]`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Num(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Table { headers, rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Column index by header prefix (headers carry units after the name).
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers
            .iter()
            .position(|h| h == name || h.starts_with(&format!("{name} ")))
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        write_record(&mut out, self.headers.iter().map(String::as_str));
        for row in &self.rows {
            let rendered: Vec<String> = row.iter().map(render_cell).collect();
            write_record(&mut out, rendered.iter().map(String::as_str));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_csv_string())
    }
}

fn render_cell(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format!("{v:.16e}"),
        Cell::Text(s) => s.clone(),
    }
}

fn write_record<'a>(out: &mut String, fields: impl Iterator<Item = &'a str>) {
    let mut first = true;
    for field in fields {
        if !first {
            out.push(',');
        }
        first = false;
        if field.contains([',', '"', '\n', '\r']) {
            let escaped = field.replace('"', "\"\"");
            let _ = write!(out, "\"{escaped}\"");
        } else {
            out.push_str(field);
        }
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(vec!["x".into(), "I_S [e*Gamma0]".into()]);
        assert_eq!(t.to_csv_string(), "x,I_S [e*Gamma0]\n");
    }

    #[test]
    fn one_row_table_has_two_lines() {
        let mut t = Table::new(vec!["x".into()]);
        t.push_row(vec![Cell::Num(0.5)]);
        let csv = t.to_csv_string();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn numbers_round_trip_bit_exactly() {
        let values = [
            1.0 / 3.25,
            -0.0,
            4.0 / 113.0,
            1e-300,
            123456.78901234567,
            f64::MIN_POSITIVE,
        ];
        let mut t = Table::new(vec!["v".into()]);
        for &v in &values {
            t.push_row(vec![Cell::Num(v)]);
        }
        let csv = t.to_csv_string();
        for (line, &v) in csv.lines().skip(1).zip(&values) {
            let parsed: f64 = line.parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits(), "{line} lost bits of {v:e}");
        }
    }

    #[test]
    fn text_fields_are_escaped_when_needed() {
        let mut t = Table::new(vec!["note".into()]);
        t.push_row(vec![Cell::text("plain")]);
        t.push_row(vec![Cell::text("with, comma")]);
        t.push_row(vec![Cell::text("with \"quote\"")]);
        let csv = t.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "plain");
        assert_eq!(lines[2], "\"with, comma\"");
        assert_eq!(lines[3], "\"with \"\"quote\"\"\"");
    }
}
