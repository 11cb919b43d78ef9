//! Report envelopes and their json/csv/text renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// The resolved settings of a run, echoed into every report. Worker count
/// is left out so that reports do not depend on it.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<String>,
    pub cell_budget: usize,
    pub seed: u64,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub materialize_cap: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<u8>>,
}

pub fn envelope(config: &RunConfig, result: Value) -> Value {
    json!({
        "version": keller_core::VERSION,
        "config": config,
        "result": result,
    })
}

/// `key.path = value` lines, arrays of scalars kept inline.
pub fn to_text(value: &Value) -> String {
    let mut out = String::new();
    flatten(value, "", &mut out);
    out
}

fn flatten(value: &Value, prefix: &str, out: &mut String) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(v, &key(k), out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array() && !is_flat(v)) => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, &key(&i.to_string()), out);
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "{prefix} = {s}");
        }
        other => {
            let _ = writeln!(out, "{prefix} = {other}");
        }
    }
}

fn is_flat(v: &Value) -> bool {
    v.as_array().is_some_and(|a| a.iter().all(|x| !x.is_object() && !x.is_array()))
}

/// Comment line that carries version and config ahead of CSV rows.
pub fn csv_preamble(config: &RunConfig) -> String {
    format!("# keller {} {}\n", keller_core::VERSION, serde_json::to_string(config).expect("config serializes"))
}

pub fn render(config: &RunConfig, result: Value) -> String {
    let doc = envelope(config, result);
    match config.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text | Format::Csv => to_text(&doc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_flattening() {
        let v = json!({"a": {"b": [1, 2], "c": "x"}, "d": [{"e": true}]});
        assert_eq!(to_text(&v), "a.b = [1,2]\na.c = x\nd.0.e = true\n");
    }
}
