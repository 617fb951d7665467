//! Report envelope shared by all experiments.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;
use crate::io::to_json;

/// Everything except `timestamp` is a pure function of the configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Report<C, R> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: C,
    pub results: R,
    pub timestamp: String,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(command: &str, config: C, results: R) -> Self {
        Self {
            tool: "hlab",
            version: crate::VERSION,
            command: command.to_string(),
            config,
            results,
            timestamp: now(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

/// Seconds since the Unix epoch, as `unix:<secs>`.
pub fn now() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

/// The JSON text with the top-level `timestamp` field removed, for
/// comparing reports across runs.
pub fn without_timestamp(json: &str) -> Result<String> {
    let mut value: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = value.as_object_mut() {
        obj.remove("timestamp");
    }
    to_json(&value)
}

/// Named pass/fail line inside a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            bound,
            passed: value <= bound,
        }
    }

    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            bound,
            passed: value < bound,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            bound,
            passed: value >= bound,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
