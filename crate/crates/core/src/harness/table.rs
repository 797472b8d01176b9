use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Output file format.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::domain(format!(
                "unknown format `{s}`, expected csv or json"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    /// Text form. Floats carry 17 significant digits, so parsing the text
    /// gives back the same value.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Float(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Float(x) if !x.is_finite() => "null".into(),
            Cell::Int(_) | Cell::Float(_) | Cell::Bool(_) => self.render(),
            Cell::Text(s) => serde_json::Value::String(s.clone()).to_string(),
            Cell::Empty => "null".into(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(o: Option<T>) -> Self {
        o.map_or(Cell::Empty, Into::into)
    }
}

/// Rows of cells under a fixed header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell by row index and column name.
    pub fn get(&self, row: usize, name: &str) -> Option<&Cell> {
        self.column(name)
            .and_then(|c| self.rows.get(row).map(|r| &r[c]))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::domain(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// An array of objects, keys in column order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
            for (j, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(
                    out,
                    "{}: {}",
                    serde_json::Value::String(col.clone()),
                    cell.json()
                );
            }
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    pub fn export(&self, format: Format, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.render(format)?).map_err(|e| Error::io(path, e))
    }

    /// Reads a CSV table back. Cells come back as text, except that empty
    /// fields become [`Cell::Empty`].
    pub fn from_csv(text: &str) -> Result<Table> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(
                rec?.iter()
                    .map(|s| {
                        if s.is_empty() {
                            Cell::Empty
                        } else {
                            Cell::Text(s.into())
                        }
                    })
                    .collect(),
            );
        }
        Ok(Table { columns, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["name", "x", "n", "ok", "note"]);
        t.push(vec![
            "a,b".into(),
            0.1.into(),
            3usize.into(),
            true.into(),
            Cell::Empty,
        ]);
        t.push(vec![
            "c".into(),
            (1.0 / 3.0).into(),
            0usize.into(),
            false.into(),
            "q\"".into(),
        ]);
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let text = t.to_csv().unwrap();
        let back = Table::from_csv(&text).unwrap();
        assert_eq!(back.columns, t.columns);
        for (a, b) in t.rows.iter().zip(&back.rows) {
            for (x, y) in a.iter().zip(b) {
                match (x, y) {
                    (Cell::Float(v), Cell::Text(s)) => assert_eq!(*v, s.parse::<f64>().unwrap()),
                    (Cell::Empty, Cell::Empty) => {}
                    (x, Cell::Text(s)) => assert_eq!(&x.render(), s),
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    #[test]
    fn floats_have_17_digits() {
        assert_eq!(Cell::Float(0.75).render(), "7.5000000000000000e-1");
        let third = Cell::Float(1.0 / 3.0).render();
        assert_eq!(third.parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn json_is_valid_and_ordered() {
        let text = sample().to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v[0]["name"], "a,b");
        assert_eq!(v[1]["x"].as_f64().unwrap(), 1.0 / 3.0);
        assert!(v[0]["note"].is_null());
        assert!(text.find("\"name\"").unwrap() < text.find("\"note\"").unwrap());
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(&["a", "b"]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n");
        assert_eq!(t.to_json(), "[]\n");
    }

    #[test]
    fn export_to_unwritable_path_fails() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.csv");
        assert!(matches!(
            sample().export(Format::Csv, &path),
            Err(Error::Io { .. })
        ));
        let ok = dir.path().join("out.json");
        sample().export(Format::Json, &ok).unwrap();
        assert!(fs::read_to_string(ok).unwrap().starts_with('['));
    }
}
