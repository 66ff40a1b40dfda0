//! Pass/fail records produced by the verifications.

use serde::Serialize;
use serde_json::{Map, Value};

/// One numerical claim: a measured value compared against a bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `measured <= bound + tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Check {
        let pass = measured.is_finite() && measured <= bound + tolerance;
        Check { name: name.into(), measured, bound, tolerance, pass }
    }

    /// Passes when `measured >= bound - tolerance`.
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Check {
        let pass = measured.is_finite() && measured >= bound - tolerance;
        Check { name: name.into(), measured, bound, tolerance, pass }
    }

    /// A yes/no condition, recorded as 1 (true) or 0 against a bound of 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Check {
        Check { name: name.into(), measured: if ok { 1.0 } else { 0.0 }, bound: 1.0, tolerance: 0.0, pass: ok }
    }
}

/// A named group of checks plus free-form diagnostic details.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub details: Map<String, Value>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>) -> Self {
        VerificationReport { name: name.into(), checks: Vec::new(), details: Map::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.details.insert(key.to_string(), v);
    }

    /// True iff every check passes.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Append another report's checks, prefixing their names.
    pub fn absorb(&mut self, other: VerificationReport) {
        for mut c in other.checks {
            c.name = format!("{}.{}", other.name, c.name);
            self.checks.push(c);
        }
        if !other.details.is_empty() {
            self.details.insert(other.name, Value::Object(other.details));
        }
    }
}
