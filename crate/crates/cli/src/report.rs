use std::fmt::Write as _;

use serde_json::{Map, Value};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// A property the command checks does not hold.
    pub const FALSE: i32 = 1;
    /// The game does not meet the command's precondition.
    pub const PRECONDITION: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const NO_INPUT: i32 = 66;
    pub const IO: i32 = 74;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Ordered report fields, rendered either as text or as one JSON object.
///
/// The text form starts with an optional headline; every number in the
/// headline must also appear as a field.
#[derive(Debug, Default)]
pub struct Report {
    headline: Option<String>,
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, game: &str) -> Self {
        let mut r = Report::default();
        r.set("command", command);
        r.set("game", game);
        r
    }

    pub fn headline(&mut self, line: impl Into<String>) -> &mut Self {
        self.headline = Some(line.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.fields).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                if let Some(h) = &self.headline {
                    out.push_str(h);
                    out.push('\n');
                }
                for (k, v) in &self.fields {
                    write_text(&mut out, k, v, 0);
                }
                out
            }
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".to_string(),
        other => other.to_string(),
    }
}

fn write_text(out: &mut String, key: &str, value: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    let key = key.replace('_', " ");
    match value {
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, v) in map {
                write_text(out, k, v, depth + 1);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, v) in items.iter().enumerate() {
                write_text(out, &i.to_string(), v, depth + 1);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{pad}{key}: {}", parts.join(" "));
        }
        v => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar(v));
        }
    }
}
