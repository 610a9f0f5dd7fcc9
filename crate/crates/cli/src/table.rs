//! Deterministic rendering of result tables. High-precision values are
//! printed with a fixed number of significant digits derived from the
//! precision; `f64` values with 17.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};
use sixvertex_core::Float;

#[derive(Debug, Clone)]
pub enum Cell {
    Big(Float),
    Real(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<Float> for Cell {
    fn from(v: Float) -> Self {
        Cell::Big(v)
    }
}

impl From<&Float> for Cell {
    fn from(v: &Float) -> Self {
        Cell::Big(v.clone())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    /// Text form, or `None` for a value with no finite rendering.
    fn number_text(&self, digits: usize) -> Option<String> {
        match self {
            Cell::Big(v) if v.is_finite() => Some(format!("{:.*e}", digits, v)),
            Cell::Real(v) if v.is_finite() => Some(format!("{v:.16e}")),
            Cell::Int(v) => Some(v.to_string()),
            _ => None,
        }
    }

    fn csv(&self, digits: usize) -> String {
        match self {
            Cell::Big(v) if !v.is_finite() => v.to_string(),
            Cell::Real(v) if !v.is_finite() => v.to_string(),
            Cell::Big(_) | Cell::Real(_) | Cell::Int(_) => self.number_text(digits).unwrap_or_default(),
            Cell::Text(s) => quote(s),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self, digits: usize) -> Value {
        match self {
            Cell::Big(_) | Cell::Real(_) | Cell::Int(_) => match self.number_text(digits) {
                Some(text) => Value::Number(text.parse::<Number>().expect("rendered number is valid JSON")),
                None => Value::Null,
            },
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: &'static str,
    /// Meaning and normalisation, e.g. `log(tau_N/c_N)`.
    pub meaning: &'static str,
}

pub const fn col(name: &'static str, meaning: &'static str) -> Column {
    Column { name, meaning }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Run metadata and aggregate results, in insertion order.
    pub summary: Vec<(String, Cell)>,
    pub digits: usize,
}

impl Table {
    pub fn new(command: impl Into<String>, columns: Vec<Column>, digits: usize) -> Self {
        Table {
            command: command.into(),
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
            digits,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    /// Header `name = meaning` per column, then one line per row.
    pub fn csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| {
                if c.meaning.is_empty() {
                    c.name.to_string()
                } else {
                    quote(&format!("{} = {}", c.name, c.meaning))
                }
            })
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.csv(self.digits)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `key: value` lines for the summary, used next to CSV output.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            let text = match v {
                Cell::Text(s) => s.clone(),
                other => other.csv(self.digits),
            };
            let _ = writeln!(out, "{k}: {text}");
        }
        out
    }

    pub fn json(&self) -> String {
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("name".into(), Value::String(c.name.into()));
                m.insert("meaning".into(), Value::String(c.meaning.into()));
                Value::Object(m)
            })
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.name.to_string(), v.json(self.digits)))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.json(self.digits))).collect();
        let mut top = Map::new();
        top.insert("command".into(), Value::String(self.command.clone()));
        top.insert("columns".into(), Value::Array(columns));
        top.insert("rows".into(), Value::Array(rows));
        top.insert("summary".into(), Value::Object(summary));
        let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON serialisation");
        text.push('\n');
        text
    }
}
