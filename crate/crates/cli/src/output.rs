//! CSV and JSON emission.
//!
//! Numbers are rounded to `precision` significant digits and then printed in
//! the shortest form that reads back to the rounded value.

use std::io::Write;

use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Absent,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Absent
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Absent, Cell::from)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutputSpec {
    pub format: Format,
    pub precision: usize,
}

impl OutputSpec {
    pub const MIN_PRECISION: usize = 6;
    pub const MAX_PRECISION: usize = 17;
    pub const DEFAULT_PRECISION: usize = 12;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Meta {
    pub command: String,
    pub model: String,
    pub units: String,
    pub parameters: Vec<(String, Cell)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    /// One record; JSON puts its keys at the top level.
    Record(Vec<(String, Cell)>),
    Rows { columns: Vec<String>, rows: Vec<Vec<Cell>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub meta: Meta,
    pub body: Body,
}

impl Document {
    pub fn render(&self, spec: OutputSpec) -> Vec<u8> {
        match spec.format {
            Format::Csv => self.csv(spec.precision),
            Format::Json => self.json(spec.precision),
        }
    }

    fn csv(&self, precision: usize) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>, fields: Vec<String>| {
            w.write_record(&fields).expect("writing to memory");
        };
        match &self.body {
            Body::Record(fields) => {
                write(&mut w, fields.iter().map(|(k, _)| k.clone()).collect());
                write(&mut w, fields.iter().map(|(_, c)| cell_text(c, precision)).collect());
            }
            Body::Rows { columns, rows } => {
                write(&mut w, columns.clone());
                for row in rows {
                    write(&mut w, row.iter().map(|c| cell_text(c, precision)).collect());
                }
            }
        }
        w.into_inner().expect("flushing to memory")
    }

    fn json(&self, precision: usize) -> Vec<u8> {
        let mut top = Map::new();
        let mut meta = Map::new();
        meta.insert("command".into(), Value::from(self.meta.command.clone()));
        meta.insert("model".into(), Value::from(self.meta.model.clone()));
        meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        meta.insert("units".into(), Value::from(self.meta.units.clone()));
        let params: Map<String, Value> =
            self.meta.parameters.iter().map(|(k, c)| (k.clone(), cell_json(c, precision))).collect();
        meta.insert("parameters".into(), Value::Object(params));
        top.insert("meta".into(), Value::Object(meta));
        match &self.body {
            Body::Record(fields) => {
                for (k, c) in fields {
                    top.insert(k.clone(), cell_json(c, precision));
                }
            }
            Body::Rows { columns, rows } => {
                let rows: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        Value::Object(columns.iter().zip(r).map(|(k, c)| (k.clone(), cell_json(c, precision))).collect())
                    })
                    .collect();
                top.insert("rows".into(), Value::Array(rows));
            }
        }
        let mut out = serde_json::to_vec_pretty(&Value::Object(top)).expect("serializing JSON");
        out.push(b'\n');
        out
    }
}

/// Rounds to `precision` significant digits; `-0` becomes `0`.
pub fn round_sig(x: f64, precision: usize) -> f64 {
    let r: f64 = format!("{:.*e}", precision.saturating_sub(1), x).parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn format_number(x: f64, precision: usize) -> String {
    let r = round_sig(x, precision);
    let mag = r.abs();
    if r == 0.0 {
        "0".into()
    } else if (1e-5..1e16).contains(&mag) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn cell_text(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Num(x) if x.is_finite() => format_number(*x, precision),
        Cell::Num(_) | Cell::Absent => String::new(),
        Cell::Int(n) => n.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

fn cell_json(c: &Cell, precision: usize) -> Value {
    match c {
        Cell::Num(x) if x.is_finite() => Value::from(round_sig(*x, precision)),
        Cell::Num(_) | Cell::Absent => Value::Null,
        Cell::Int(n) => Value::from(*n),
        Cell::Text(s) => Value::from(s.clone()),
        Cell::Bool(b) => Value::from(*b),
    }
}

pub fn emit(bytes: &[u8], out: Option<&std::path::Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)?;
            lock.flush()
        }
    }
}
