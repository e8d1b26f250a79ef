use serde::Serialize;
use serde_json::Value;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl Serialize, actual: impl Serialize) -> Self {
        let expected = serde_json::to_value(expected).expect("serializable");
        let actual = serde_json::to_value(actual).expect("serializable");
        Self { name: name.into(), pass: expected == actual, expected, actual }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock measurements; the only part of a report that varies between runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Value>,
    pub version: String,
    #[serde(skip)]
    pub table: Vec<String>,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            results: Value::Null,
            checks: vec![],
            notes: vec![],
            timing: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            table: vec![],
        }
    }

    pub fn check(&mut self, name: impl Into<String>, expected: impl Serialize, actual: impl Serialize) {
        self.checks.push(Check::new(name, expected, actual));
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.table.push(s.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        out.push_str(&format!("qclif {} · {} · unix time {stamp}\n", self.version, self.command));
        for l in &self.table {
            out.push_str(l);
            out.push('\n');
        }
        if let Some(t) = &self.timing {
            out.push_str(&format!("timing: {t}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        if !self.checks.is_empty() {
            out.push('\n');
            for c in &self.checks {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                if c.pass {
                    out.push_str(&format!("  {mark}  {}: {}\n", c.name, c.actual));
                } else {
                    out.push_str(&format!("  {mark}  {}: expected {}, got {}\n", c.name, c.expected, c.actual));
                }
            }
            let passed = self.checks.iter().filter(|c| c.pass).count();
            out.push_str(&format!("{passed}/{} checks passed\n", self.checks.len()));
        }
        out
    }
}
