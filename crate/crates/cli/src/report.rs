use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

/// Everything a command produced. Both output modes render this one record.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub values: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<CheckResult>,
    pub timing_ms: u128,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport { command: command.to_string(), ..Default::default() }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.to_string(), value.to_string());
    }

    pub fn value(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.values.insert(key.to_string(), v);
    }

    pub fn check(&mut self, name: impl Into<String>, expected: impl ToString, actual: impl ToString, pass: bool) {
        self.checks.push(CheckResult {
            name: name.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            pass,
        });
    }

    /// Records an equality check.
    pub fn check_eq<T: PartialEq + ToString>(&mut self, name: impl Into<String>, expected: T, actual: T) {
        let pass = expected == actual;
        self.check(name, expected, actual, pass);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn sort_checks(&mut self) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "{k}: {v}");
        }
        for (k, v) in &self.values {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "{k} = {text}");
        }
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{verdict} {}: expected {}, got {}", c.name, c.expected, c.actual);
        }
        if !self.checks.is_empty() {
            let passed = self.checks.iter().filter(|c| c.pass).count();
            let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        }
        out
    }
}
