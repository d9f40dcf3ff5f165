//! CSV and JSON emission. CSV floats carry 17 significant digits; JSON uses
//! the shortest text that round-trips.

use serde_json::{Map, Value};

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const UNITS: &str = "hbar=1, 2m=1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => csv_float(*x),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Bool(b) => Value::from(*b),
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => Value::from(*x),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub fn csv_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// A command result: computed metadata plus one table.
#[derive(Debug, Clone)]
pub struct Report {
    pub config: RunConfig,
    pub meta: Vec<(String, Cell)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Emit `data` as an object of scalars instead of column arrays.
    pub single: bool,
}

impl Report {
    pub fn new(config: &RunConfig, header: Vec<&'static str>) -> Self {
        Self { config: config.clone(), meta: Vec::new(), header, rows: Vec::new(), single: false }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn render(&self) -> String {
        match self.config.format {
            crate::config::Format::Csv => self.to_csv(),
            crate::config::Format::Json => self.to_json(),
        }
    }

    fn config_entries(&self) -> Map<String, Value> {
        match serde_json::to_value(&self.config) {
            Ok(Value::Object(map)) => map,
            _ => Map::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# ucp {}\n", self.config.command));
        out.push_str(&format!("# version: {VERSION}\n"));
        out.push_str(&format!("# units: {UNITS}\n"));
        for (key, value) in self.config_entries() {
            if key == "command" {
                continue;
            }
            let text = match value {
                Value::Number(n) if n.is_f64() => csv_float(n.as_f64().unwrap_or(f64::NAN)),
                Value::String(s) => s,
                Value::Array(items) => items.iter().map(Value::to_string).collect::<Vec<_>>().join(","),
                other => other.to_string(),
            };
            out.push_str(&format!("# {key}: {text}\n"));
        }
        for (key, value) in &self.meta {
            out.push_str(&format!("# {key}: {}\n", value.csv()));
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut meta = Map::new();
        meta.insert("command".into(), Value::from(self.config.command.as_str()));
        meta.insert("version".into(), Value::from(VERSION));
        meta.insert("units".into(), Value::from(UNITS));
        meta.insert("config".into(), Value::Object(self.config_entries()));
        for (key, value) in &self.meta {
            meta.insert(key.clone(), value.json());
        }
        let mut data = Map::new();
        for (col, name) in self.header.iter().enumerate() {
            let value = if self.single {
                self.rows.first().map_or(Value::Null, |row| row[col].json())
            } else {
                Value::Array(self.rows.iter().map(|row| row[col].json()).collect())
            };
            data.insert(name.to_string(), value);
        }
        let mut root = Map::new();
        root.insert("meta".into(), Value::Object(meta));
        root.insert("data".into(), Value::Object(data));
        let mut text = Value::Object(root).to_string();
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(csv_float(0.1), "1.0000000000000001e-1");
        assert_eq!(csv_float(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(csv_float(f64::NAN), "NaN");
    }

    #[test]
    fn csv_has_header_block_and_lf() {
        let config = RunConfig { command: "layout".into(), n: Some(2), ..Default::default() };
        let mut report = Report::new(&config, vec!["index", "start"]);
        report.rows.push(vec![Cell::from(0usize), Cell::from(0.5)]);
        let text = report.to_csv();
        assert!(text.starts_with("# ucp layout\n# version: "));
        assert!(text.contains("# units: hbar=1, 2m=1\n"));
        assert!(text.contains("# N: 2\n"));
        assert!(text.ends_with("index,start\n0,5.0000000000000000e-1\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn text_with_commas_is_quoted() {
        assert_eq!(Cell::from("a,b").csv(), "\"a,b\"");
        assert_eq!(Cell::from("say \"hi\", ok").csv(), "\"say \"\"hi\"\", ok\"");
        assert_eq!(Cell::from("plain").csv(), "plain");
    }

    #[test]
    fn json_shape() {
        let config = RunConfig { command: "transmit".into(), ..Default::default() };
        let mut report = Report::new(&config, vec!["T"]);
        report.single = true;
        report.rows.push(vec![Cell::from(0.25)]);
        let value: Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(value["data"]["T"], 0.25);
        assert_eq!(value["meta"]["units"], UNITS);
    }
}
