//! Verification cases and output in JSON or CSV.

use std::io::Write;

use serde_json::{json, Value};

use crate::config::Format;
use crate::CliError;

/// One comparison of two computations of the same quantity.
#[derive(Clone, Debug)]
pub struct Case {
    pub name: String,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_abs_diff: f64,
    pub pass: bool,
}

impl Case {
    pub fn new(name: impl Into<String>, lhs: Vec<f64>, rhs: Vec<f64>, tol: f64) -> Self {
        let max_abs_diff = if lhs.len() == rhs.len() {
            lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        Case {
            name: name.into(),
            pass: max_abs_diff <= tol,
            lhs,
            rhs,
            max_abs_diff,
        }
    }

    pub fn scalar(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Case::new(name, vec![lhs], vec![rhs], tol)
    }

    /// A case decided exactly; the values are shown for reference.
    pub fn exact(name: impl Into<String>, lhs: Vec<f64>, rhs: Vec<f64>, equal: bool) -> Self {
        let mut c = Case::new(name, lhs, rhs, f64::INFINITY);
        c.pass = equal;
        c
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "max_abs_diff": finite(self.max_abs_diff),
            "pass": self.pass,
        })
    }
}

/// JSON has no infinity; mismatched shapes are reported as null.
fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// A set of cases with the run's inputs and tolerances.
pub struct Verification {
    pub command: String,
    pub inputs: Value,
    pub tolerances: Value,
    pub cases: Vec<Case>,
    pub skipped: Vec<String>,
}

impl Verification {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn max_abs_diff(&self) -> f64 {
        self.cases.iter().map(|c| c.max_abs_diff).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "tolerances": self.tolerances,
            "cases": self.cases.iter().map(Case::to_json).collect::<Vec<_>>(),
            "skipped": self.skipped,
            "lhs": self.cases.iter().map(|c| json!(c.lhs)).collect::<Vec<_>>(),
            "rhs": self.cases.iter().map(|c| json!(c.rhs)).collect::<Vec<_>>(),
            "max_abs_diff": finite(self.max_abs_diff()),
            "pass": self.pass(),
        })
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Json => write_json(&self.to_json(), out),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["command", "case", "max_abs_diff", "pass", "lhs", "rhs"])?;
                for c in &self.cases {
                    w.write_record([
                        self.command.clone(),
                        c.name.clone(),
                        c.max_abs_diff.to_string(),
                        c.pass.to_string(),
                        join(&c.lhs),
                        join(&c.rhs),
                    ])?;
                }
                w.flush()?;
                Ok(())
            }
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub fn write_json(value: &Value, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Flattens a JSON object into `key,value` rows; nested values are written
/// as compact JSON.
pub fn write_flat_csv(value: &Value, out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["key", "value"])?;
    if let Value::Object(map) = value {
        for (k, v) in map {
            let cell = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            w.write_record([k.as_str(), cell.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_value(value: &Value, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(value, out),
        Format::Csv => write_flat_csv(value, out),
    }
}
