use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;

/// A finished command: one payload rendered three ways.
pub struct Output {
    pub command: &'static str,
    pub passed: bool,
    pub report: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub text: String,
}

impl Output {
    pub fn new(command: &'static str, report: &impl Serialize) -> Self {
        Self {
            command,
            passed: true,
            report: serde_json::to_value(report).expect("reports serialize"),
            header: Vec::new(),
            rows: Vec::new(),
            text: String::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let doc = json!({
                    "schema": aperylike::SCHEMA_VERSION,
                    "command": self.command,
                    "passed": self.passed,
                    "report": self.report,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("json");
                s.push('\n');
                s
            }
            Format::Csv => csv_string(&self.header, &self.rows),
            Format::Text => self.text.clone(),
        }
    }
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn emit(body: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, body),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()
        }
    }
}
