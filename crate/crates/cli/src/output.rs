use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use kitaev_core::correlations::truncate_decimals;

pub type IoResult<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// One table cell. CSV uses the fixed textual form; JSON keeps full precision.
#[derive(Clone, Debug)]
pub enum Cell {
    /// Six decimals.
    Float(f64),
    /// Three decimals, truncated, as in the published table.
    Z(f64),
    /// Scientific notation, for residuals and differences.
    Sci(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format!("{:.6}", clean_zero(*x)),
            Cell::Z(x) => format!("{:.3}", clean_zero(truncate_decimals(*x, 3))),
            Cell::Sci(x) => format!("{x:.3e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) | Cell::Z(x) | Cell::Sci(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Avoids printing `-0.000000`.
fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> IoResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    fn to_json(&self, config: &Value) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.to_string(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "config": config, "rows": rows })
    }

    pub fn emit(&self, format: Format, config: &Value, out: Option<&Path>) -> IoResult<()> {
        let bytes = match format {
            Format::Csv => self.to_csv()?,
            Format::Json => {
                let mut b = serde_json::to_vec_pretty(&self.to_json(config))?;
                b.push(b'\n');
                b
            }
        };
        match out {
            Some(path) => std::fs::write(path, bytes)?,
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}
