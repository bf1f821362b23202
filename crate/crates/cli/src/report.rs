//! Run reports: what was asked, what was read, what came out, and which
//! bound checks passed. Rendered for people or as `key=value` lines.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Number format used for every reported value.
pub fn num(x: f64) -> String {
    let s = format!("{x:.10}");
    // no "-0.0000000000"
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

enum Value {
    Number { value: f64, tol: f64 },
    Text(String),
}

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Default)]
pub struct Report {
    command: String,
    inputs: Vec<(String, String)>,
    results: Vec<(String, Value)>,
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            ..Report::default()
        }
    }

    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push((path.to_string(), sha256_hex(bytes)));
    }

    pub fn number(&mut self, key: &str, value: f64, tol: f64) {
        self.results
            .push((key.to_string(), Value::Number { value, tol }));
    }

    /// A bound or other small quantity, in scientific notation.
    pub fn bound(&mut self, key: &str, value: f64) {
        self.results
            .push((key.to_string(), Value::Text(format!("{value:e}"))));
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) {
        self.results
            .push((key.to_string(), Value::Text(value.into())));
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, machine: bool) -> String {
        let mut out = String::new();
        let verdict = |c: &Check| if c.pass { "PASS" } else { "FAIL" };
        if machine {
            let _ = writeln!(out, "command={}", self.command);
            for (i, (path, digest)) in self.inputs.iter().enumerate() {
                let _ = writeln!(out, "input.{i}.path={path}");
                let _ = writeln!(out, "input.{i}.sha256={digest}");
            }
            for (key, v) in &self.results {
                match v {
                    Value::Number { value, tol } => {
                        let _ = writeln!(out, "{key}={}", num(*value));
                        let _ = writeln!(out, "{key}.tol={tol:e}");
                    }
                    Value::Text(t) => {
                        let _ = writeln!(out, "{key}={t}");
                    }
                }
            }
            for c in &self.checks {
                let _ = writeln!(out, "check.{}={}", c.name, verdict(c));
            }
            for (i, n) in self.notes.iter().enumerate() {
                let _ = writeln!(out, "note.{i}={n}");
            }
            let _ = writeln!(
                out,
                "status={}",
                if self.all_pass() { "ok" } else { "fail" }
            );
        } else {
            let _ = writeln!(out, "command: {}", self.command);
            for (path, digest) in &self.inputs {
                let _ = writeln!(out, "input:   {path} sha256={digest}");
            }
            let width = self.results.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (key, v) in &self.results {
                match v {
                    Value::Number { value, tol } => {
                        let _ = writeln!(out, "  {key:<width$} = {}  (tol {tol:e})", num(*value));
                    }
                    Value::Text(t) => {
                        let _ = writeln!(out, "  {key:<width$} = {t}");
                    }
                }
            }
            for c in &self.checks {
                let _ = writeln!(out, "check {}: {} ({})", c.name, verdict(c), c.detail);
            }
            for n in &self.notes {
                let _ = writeln!(out, "note: {n}");
            }
        }
        out
    }
}
