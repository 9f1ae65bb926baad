//! JSON and text rendering of run records.

use serde_json::{json, Value as Json};

use crate::error::CliError;
use crate::eval::Record;
use crate::RunOutput;

/// Whether a record reports a failed check (rules suite or reciprocity).
pub fn is_failure(r: &Record) -> bool {
    r.get("command") == Some(&json!("rules-suite")) && r.get("result") == Some(&json!("fail"))
}

pub fn error_record(e: &CliError) -> Record {
    let mut err = serde_json::Map::new();
    err.insert("kind".into(), json!(e.kind_name()));
    err.insert("line".into(), e.pos.map(|p| json!(p.line)).unwrap_or(Json::Null));
    err.insert("column".into(), e.pos.map(|p| json!(p.col)).unwrap_or(Json::Null));
    err.insert("message".into(), json!(e.message));
    let mut r = serde_json::Map::new();
    r.insert("command".into(), json!("error"));
    r.insert("error".into(), Json::Object(err));
    r
}

/// Pretty-printed JSON array; a trailing error record if the run stopped.
pub fn render_json(out: &RunOutput) -> String {
    let mut items: Vec<Json> = out.records.iter().cloned().map(Json::Object).collect();
    if let Some(e) = &out.error {
        items.push(Json::Object(error_record(e)));
    }
    serde_json::to_string_pretty(&Json::Array(items)).unwrap() + "\n"
}

fn scalar(v: &Json) -> String {
    match v {
        Json::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn inline(v: &Json) -> String {
    match v {
        Json::Object(m) => m.iter().map(|(k, v)| format!("{k}={}", inline(v))).collect::<Vec<_>>().join(", "),
        Json::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => scalar(other),
    }
}

/// One record as text: the result line, then indented details.
pub fn render_record(r: &Record) -> String {
    let cmd = r.get("command").map(scalar).unwrap_or_default();
    let mut out = format!("{cmd}: {}\n", r.get("result").map(scalar).unwrap_or_default());
    for (k, v) in r {
        if matches!(k.as_str(), "command" | "result" | "inputs") {
            continue;
        }
        match v {
            Json::Array(items) => {
                out.push_str(&format!("  {k}:\n"));
                for it in items {
                    out.push_str(&format!("    - {}\n", inline(it)));
                }
            }
            other => out.push_str(&format!("  {k}: {}\n", inline(other))),
        }
    }
    out
}

pub fn render_text(out: &RunOutput) -> String {
    out.records.iter().map(render_record).collect()
}
