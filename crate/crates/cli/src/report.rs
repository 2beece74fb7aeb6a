use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Verified,
    Refuted,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Verified => 0,
            Outcome::Refuted => 1,
            Outcome::Inconclusive => 2,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Verified
        } else {
            Outcome::Refuted
        }
    }
}

/// What a command hands back: a verdict and its result section.
pub struct Finding {
    pub outcome: Outcome,
    pub result: Value,
}

impl Finding {
    pub fn new(outcome: Outcome, result: impl Serialize) -> Self {
        Finding { outcome, result: serde_json::to_value(result).expect("reports serialize") }
    }
}

/// Assembles the report. Everything except `timing` is a function of the
/// command line alone.
pub fn envelope(command: &str, config: Value, finding: &Finding, wall_time_ms: Option<u64>) -> Value {
    let mut report = json!({
        "tool": "varieties",
        "version": env!("CARGO_PKG_VERSION"),
        "format_version": varieties_core::FORMAT_VERSION,
        "command": command,
        "config": config,
        "verdict": finding.outcome,
        "result": finding.result,
    });
    if let Some(ms) = wall_time_ms {
        report["timing"] = json!({ "wall_time_ms": ms });
    }
    report
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("valid json");
            s.push('\n');
            s
        }
        Format::Markdown => markdown(report),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
    .replace('|', "\\|")
}

fn table(out: &mut String, obj: &serde_json::Map<String, Value>) -> Vec<(String, Value)> {
    let mut nested = Vec::new();
    out.push_str("| field | value |\n|---|---|\n");
    for (k, v) in obj {
        match v {
            Value::Object(_) | Value::Array(_) if v.to_string().len() > 60 => nested.push((k.clone(), v.clone())),
            _ => {
                let _ = writeln!(out, "| {k} | {} |", cell(v));
            }
        }
    }
    nested
}

fn markdown(report: &Value) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {} ({})\n", report["command"].as_str().unwrap_or("?"), cell(&report["verdict"]));
    let _ = writeln!(out, "varieties {}\n", cell(&report["version"]));
    for section in ["config", "result", "timing"] {
        let Some(obj) = report.get(section).and_then(Value::as_object) else {
            continue;
        };
        let _ = writeln!(out, "## {section}\n");
        let nested = table(&mut out, obj);
        for (k, v) in nested {
            let _ =
                writeln!(out, "\n### {k}\n\n```json\n{}\n```", serde_json::to_string_pretty(&v).expect("valid json"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Outcome::Verified.exit_code(), 0);
        assert_eq!(Outcome::Refuted.exit_code(), 1);
        assert_eq!(Outcome::Inconclusive.exit_code(), 2);
        assert_eq!(Outcome::from_bool(false), Outcome::Refuted);
    }

    #[test]
    fn envelope_sections() {
        let finding = Finding::new(Outcome::Verified, json!({ "holds": true }));
        let r = envelope("rank inequality", json!({ "p": 3 }), &finding, None);
        assert_eq!(r["verdict"], "verified");
        assert!(r.get("timing").is_none());
        let timed = envelope("rank inequality", json!({ "p": 3 }), &finding, Some(5));
        assert_eq!(timed["timing"]["wall_time_ms"], 5);
        assert!(render(&r, Format::Json).ends_with("}\n"));
    }

    #[test]
    fn markdown_tables() {
        let finding = Finding::new(Outcome::Refuted, json!({ "word": "a|b", "list": (0..40).collect::<Vec<_>>() }));
        let text = render(&envelope("words parse", json!({}), &finding, None), Format::Markdown);
        assert!(text.starts_with("# words parse (refuted)"));
        assert!(text.contains("| word | a\\|b |"));
        assert!(text.contains("### list"));
    }
}
