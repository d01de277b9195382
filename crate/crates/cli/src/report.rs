use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use qlp_core::rational::to_display;
use qlp_core::Rational;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// What a command produced: a verdict, the same data as JSON and as text,
/// and documents to write under `--out`.
pub struct Report {
    pub command: String,
    pub status: Status,
    pub json: Map<String, Value>,
    pub text: String,
    pub artifacts: Vec<(String, String)>,
    /// Text output is a document on its own, without the status line.
    pub bare: bool,
}

impl Report {
    pub fn new(command: &str, status: Status) -> Report {
        Report { command: command.into(), status, json: Map::new(), text: String::new(), artifacts: Vec::new(), bare: false }
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.json.insert(key.into(), value);
        self
    }

    pub fn line(&mut self, line: impl AsRef<str>) -> &mut Self {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
        self
    }

    pub fn artifact(&mut self, name: &str, contents: String) -> &mut Self {
        self.artifacts.push((name.into(), contents));
        self
    }

    pub fn to_json(&self) -> String {
        let mut doc = self.json.clone();
        doc.insert("command".into(), json!(self.command));
        doc.insert("status".into(), json!(self.status.name()));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = self.text.clone();
        if !self.bare {
            let _ = writeln!(s, "status: {}", self.status.name());
        }
        s
    }

    pub fn write_to(&self, dir: &Path, json: bool) -> anyhow::Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let (name, body) = if json { ("report.json", self.to_json()) } else { ("report.txt", self.to_text()) };
        for (file, contents) in self.artifacts.iter().map(|(f, c)| (f.as_str(), c)).chain([(name, &body)]) {
            let path = dir.join(file);
            fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        }
        Ok(())
    }
}

pub fn frac(r: &Rational) -> Value {
    Value::String(r.to_string())
}

/// Rows padded to the width of the first column.
pub fn table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    rows.iter()
        .map(|(a, b)| format!("  {a:<width$}  {b}\n"))
        .collect()
}

pub fn value_rows<'a>(rows: impl IntoIterator<Item = (String, &'a Rational)>) -> Vec<(String, String)> {
    rows.into_iter().map(|(k, v)| (k, to_display(v))).collect()
}
