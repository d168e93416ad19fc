use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
/// Significant digits for every printed real.
pub const DIGITS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
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

/// `v` rounded to [`DIGITS`] significant digits, in plain notation when
/// that is readable and scientific otherwise.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.prec$e}", prec = DIGITS - 1)
    }
}

fn rounded(v: f64) -> Value {
    match format_real(v).parse::<f64>() {
        Ok(r) if r.is_finite() => Value::from(r),
        _ => Value::Null,
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(v) => rounded(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Tabular result of one command, with the config that produced it.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema_version: u32,
    command: &'a str,
    config: &'a RunConfig,
    columns: &'a [&'static str],
    rows: Vec<Vec<Value>>,
    notes: &'a [String],
}

impl Report {
    pub fn new(command: &str, config: &RunConfig, columns: &[&'static str]) -> Self {
        Report {
            command: command.into(),
            config: config.clone(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        match self.config.format {
            Format::Json => {
                let doc = JsonReport {
                    schema_version: SCHEMA_VERSION,
                    command: &self.command,
                    config: &self.config,
                    columns: &self.columns,
                    rows: self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect(),
                    notes: &self.notes,
                };
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable report");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = format!("# adqec schema_version={SCHEMA_VERSION} command={}\n", self.command);
                s += &format!("# config={}\n", serde_json::to_string(&self.config).expect("serializable config"));
                for n in &self.notes {
                    s += &format!("# {n}\n");
                }
                s += &self.columns.join(",");
                s.push('\n');
                for r in &self.rows {
                    s += &r.iter().map(Cell::csv).collect::<Vec<_>>().join(",");
                    s.push('\n');
                }
                s
            }
        }
    }

    pub fn emit(&self) -> Result<(), CliError> {
        let text = self.render();
        match &self.config.out {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
            }
        }
    }
}
