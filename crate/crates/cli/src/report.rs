use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    /// Graphviz; only for tree-producing analyses.
    Dot,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub iterations: usize,
    pub basis_size: usize,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub transition: String,
    pub label: String,
    pub strict: bool,
    pub x: Vec<u64>,
    pub x_prime: Vec<u64>,
    pub y: Vec<u64>,
}

/// The outcome of one query. Field order is the JSON key order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub analysis: String,
    pub model: String,
    pub verdict: String,
    /// Transition ids, in firing order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clover: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleReport>,
    pub stats: Stats,
    pub ordering: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, Value>,
    /// Wall-clock time; the only field that may differ between identical runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(analysis: &str, model: &str, verdict: &str, ordering: &str) -> Self {
        Report {
            analysis: analysis.into(),
            model: model.into(),
            verdict: verdict.into(),
            witness: None,
            basis: None,
            clover: None,
            counterexample: None,
            stats: Stats::default(),
            ordering: ordering.into(),
            extras: BTreeMap::new(),
            timing_ms: None,
        }
    }

    pub fn extra(mut self, key: &str, value: Value) -> Self {
        self.extras.insert(key.into(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// The JSON form without timing; byte-identical across runs on identical inputs.
    pub fn canonical_json(&self) -> String {
        Report {
            timing_ms: None,
            ..self.clone()
        }
        .to_json()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} on {}: {}", self.analysis, self.model, self.verdict).unwrap();
        if let Some(w) = &self.witness {
            let path = if w.is_empty() {
                "(empty)".to_string()
            } else {
                w.join(" ")
            };
            writeln!(out, "  witness: {path}").unwrap();
        }
        for (name, items) in [("basis", &self.basis), ("clover", &self.clover)] {
            if let Some(items) = items {
                writeln!(out, "  {name} ({}):", items.len()).unwrap();
                for it in items {
                    writeln!(out, "    {it}").unwrap();
                }
            }
        }
        if let Some(c) = &self.counterexample {
            let v = |x: &[u64]| {
                format!(
                    "({})",
                    x.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
                )
            };
            writeln!(
                out,
                "  counterexample: {} ({}){}: x={} x'={} y={}",
                c.transition,
                c.label,
                if c.strict { " strict" } else { "" },
                v(&c.x),
                v(&c.x_prime),
                v(&c.y)
            )
            .unwrap();
        }
        writeln!(out, "  ordering: {}", self.ordering).unwrap();
        writeln!(
            out,
            "  stats: iterations={} basis_size={} nodes={}",
            self.stats.iterations, self.stats.basis_size, self.stats.nodes
        )
        .unwrap();
        for (k, v) in &self.extras {
            match v {
                Value::String(s) if s.contains('\n') => {
                    writeln!(out, "  {k}:").unwrap();
                    for line in s.lines() {
                        writeln!(out, "    {line}").unwrap();
                    }
                }
                Value::String(s) => writeln!(out, "  {k}: {s}").unwrap(),
                other => writeln!(out, "  {k}: {other}").unwrap(),
            }
        }
        if let Some(ms) = self.timing_ms {
            writeln!(out, "  time: {ms:.1} ms").unwrap();
        }
        out
    }
}

/// A report plus the artifacts some analyses produce alongside it.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub dot: Option<String>,
    /// The transformed model, for `abstract`.
    pub model_text: Option<String>,
    /// 0, or 4 when a search ran out of budget without a result.
    pub exit_code: i32,
}

impl Outcome {
    pub fn new(report: Report) -> Self {
        Outcome {
            report,
            dot: None,
            model_text: None,
            exit_code: 0,
        }
    }
}

/// Renders an outcome. Text output of `abstract` is the model itself, so it
/// can be fed back to the parser.
pub fn emit_report(outcome: &Outcome, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(outcome.report.to_json() + "\n"),
        Format::Text => Ok(match &outcome.model_text {
            Some(text) => text.clone(),
            None => outcome.report.to_text(),
        }),
        Format::Dot => outcome.dot.clone().ok_or_else(|| {
            CliError::Unsupported(format!(
                "dot output needs a tree-producing analysis (karp-miller, termination, boundedness), not {}",
                outcome.report.analysis
            ))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order_and_absent_fields() {
        let mut r = Report::new("coverability", "m.wsts", "not-coverable", "dickson");
        r.timing_ms = Some(1.5);
        assert_eq!(
            r.to_json(),
            r#"{"analysis":"coverability","model":"m.wsts","verdict":"not-coverable","stats":{"iterations":0,"basis_size":0,"nodes":0},"ordering":"dickson","timing_ms":1.5}"#
        );
        r.witness = Some(vec!["t1".into(), "t2".into()]);
        let json = r.canonical_json();
        assert!(
            json.contains(r#""verdict":"not-coverable","witness":["t1","t2"],"stats""#),
            "{json}"
        );
        assert!(!json.contains("timing"));
    }

    #[test]
    fn dot_needs_a_tree() {
        let o = Outcome::new(Report::new("decide", "s", "true", "none"));
        assert!(matches!(
            emit_report(&o, Format::Dot),
            Err(CliError::Unsupported(_))
        ));
        let o = Outcome {
            dot: Some("digraph km {\n}\n".into()),
            ..o
        };
        assert!(emit_report(&o, Format::Dot)
            .unwrap()
            .starts_with("digraph km {"));
    }
}
