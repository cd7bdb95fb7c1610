//! Suite configuration and the report format shared by every checker.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::FormatError;
use crate::measure::Mode;

/// Version expected in the top-level `"format"` field of input documents.
pub const FORMAT_VERSION: u64 = 1;

/// Parses an input document, requiring `"format": 1` at the top level.
/// Deserialization errors carry the line and column.
pub fn parse_document<T: DeserializeOwned>(text: &str) -> Result<T, crate::Error> {
    let v: Value = serde_json::from_str(text)?;
    match v.get("format") {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION) => {}
        Some(Value::Number(n)) => return Err(FormatError::Version(n.as_u64().unwrap_or(u64::MAX)).into()),
        Some(_) => {
            return Err(FormatError::Schema { path: "format".into(), message: "expected an integer".into() }.into())
        }
        None => {
            return Err(FormatError::Schema { path: "format".into(), message: "missing version field".into() }.into())
        }
    }
    Ok(serde_json::from_str(text)?)
}

/// Witnesses kept per check; further failures are only counted.
pub const MAX_WITNESSES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?} (expected json or text)")),
        }
    }
}

/// Generator bounds for the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub max_ground_size: usize,
    pub max_denominator: u32,
    pub cases: usize,
    pub mode: Mode,
    #[serde(skip)]
    pub format: Format,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            max_ground_size: 5,
            max_denominator: 12,
            cases: 500,
            mode: Mode::Sigma,
            format: Format::Json,
        }
    }
}

impl SuiteConfig {
    pub fn with_cases(mut self, cases: usize) -> Self {
        self.cases = cases;
        self
    }

    pub fn with_size(mut self, n: usize) -> Self {
        self.max_ground_size = n;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_denominator(mut self, d: u32) -> Self {
        self.max_denominator = d;
        self
    }

    /// All bounds must be positive.
    pub fn validate(&self) -> Result<(), String> {
        if self.max_ground_size == 0 || self.max_denominator == 0 || self.cases == 0 {
            return Err("size, denominator and cases must all be positive".into());
        }
        Ok(())
    }
}

/// Pass/fail tally for one property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    pub witnesses: Vec<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Check { name: name.into(), checked: 0, failed: 0, witnesses: Vec::new() }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

/// Output of a suite. Contains no timing data, so it is a pure function of
/// the configuration and inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    /// Computed quantities, for runs on a given input.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Report>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), checks: Vec::new(), values: BTreeMap::new(), notes: Vec::new(), parts: Vec::new() }
    }

    pub fn with_checks(suite: impl Into<String>, checks: Vec<Check>) -> Self {
        Report { checks, ..Report::new(suite) }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn value(mut self, key: impl Into<String>, v: Value) -> Self {
        self.values.insert(key.into(), v);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed) && self.parts.iter().all(Report::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{pad}{verdict} {}", self.suite);
        for c in &self.checks {
            let v = if c.passed() { "ok" } else { "FAILED" };
            let _ = writeln!(out, "{pad}  {:<32} {:>7} checked {:>5} failed  {v}", c.name, c.checked, c.failed);
            for w in &c.witnesses {
                let _ = writeln!(out, "{pad}    witness: {w}");
            }
        }
        for (k, v) in &self.values {
            let _ = writeln!(out, "{pad}  {k}: {v}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "{pad}  note: {n}");
        }
        for p in &self.parts {
            p.write_text(out, depth + 1);
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json() + "\n",
            Format::Text => self.to_text(),
        }
    }
}
