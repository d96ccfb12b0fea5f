//! Versioned JSON reports.

use crate::config::{RunConfig, KEYS};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "qspace-report/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// sha256 of the canonical config text, lower-case hex.
pub fn config_hash(cfg: &RunConfig) -> String {
    format!("{:x}", Sha256::digest(cfg.canonical_text().as_bytes()))
}

pub fn config_json(cfg: &RunConfig) -> Value {
    let mut m = Map::new();
    for k in KEYS {
        m.insert(k.to_string(), Value::String(cfg.get(k)));
    }
    Value::Object(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// One threshold comparison: `value` must not exceed `limit`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, pass: value < limit }
    }

    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, pass: value <= limit }
    }

    pub fn to_json(&self) -> Value {
        json!({ "name": self.name, "value": self.value, "limit": self.limit, "pass": self.pass })
    }
}

pub fn document(cfg: &RunConfig, command: &str, status: Status, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "version": VERSION,
        "command": command,
        "config_hash": config_hash(cfg),
        "config": config_json(cfg),
        "status": status.name(),
        "result": result,
    })
}

/// Pretty-printed report text with a trailing newline.
pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report values are serializable");
    s.push('\n');
    s
}

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Row-major nested arrays of [re, im] pairs.
pub fn matrix(m: &DMatrix<Complex64>) -> Value {
    Value::Array((0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| complex(m[(r, c)])).collect())).collect())
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
