//! Tabular output: CSV with a mandatory header row, or a JSON array of
//! row objects.  Floats are printed with 15 significant digits and a '.'
//! decimal separator; exact integers are printed in full.  Non-finite
//! values are refused — a command must fail instead of emitting NaN.

use std::io::Write;

use crate::{AppError, AppResult, Format};

#[derive(Debug, Clone)]
pub enum Cell {
    /// Small positional integer (row index, comb tooth, ...).
    Index(u64),
    /// Exact big integer, already in decimal.
    Exact(String),
    Float(f64),
}

impl Cell {
    fn csv(&self) -> AppResult<String> {
        match self {
            Cell::Index(v) => Ok(v.to_string()),
            Cell::Exact(digits) => Ok(digits.clone()),
            Cell::Float(v) => {
                if !v.is_finite() {
                    return Err(AppError::NonFinite(format!("refusing to emit {v}")));
                }
                Ok(format!("{v:.14e}"))
            }
        }
    }

    fn json(&self) -> AppResult<serde_json::Value> {
        match self {
            Cell::Index(v) => Ok(serde_json::Value::from(*v)),
            // Exact integers may exceed every machine width; keep digits.
            Cell::Exact(digits) => Ok(serde_json::Value::String(digits.clone())),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .ok_or_else(|| AppError::NonFinite(format!("refusing to emit {v}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn from_header(header: Vec<String>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "ragged table row");
        self.rows.push(row);
    }

    pub fn emit(&self, format: Format, out: &mut dyn Write) -> AppResult<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> AppResult<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: AppResult<Vec<String>> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells?.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> AppResult<()> {
        let mut array = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            for (name, cell) in self.header.iter().zip(row) {
                obj.insert(name.clone(), cell.json()?);
            }
            array.push(serde_json::Value::Object(obj));
        }
        let rendered = serde_json::to_string_pretty(&serde_json::Value::Array(array))
            .expect("table is serializable");
        writeln!(out, "{rendered}")?;
        Ok(())
    }
}
