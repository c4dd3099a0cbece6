//! Solution reports: JSON for tools, plain text for people.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::frontend::{serialize_term, NetGraph};
use crate::mdl::Term;
use crate::solver::{Outcome, Problem, SolveReport};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConstraintStatus {
    pub origin: String,
    pub verified: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonReport {
    pub status: String,
    #[serde(default)]
    pub flags: BTreeMap<String, bool>,
    #[serde(default)]
    pub variables_up: BTreeMap<String, String>,
    #[serde(default)]
    pub variables_down: BTreeMap<String, String>,
    #[serde(default)]
    pub dead_variants: Vec<String>,
    #[serde(default)]
    pub constraints: Vec<ConstraintStatus>,
}

fn render(bindings: &BTreeMap<String, Term>) -> BTreeMap<String, String> {
    bindings.iter().map(|(k, v)| (k.clone(), serialize_term(v))).collect()
}

impl JsonReport {
    pub fn new(problem: &Problem, report: &SolveReport) -> Self {
        let mut out = JsonReport {
            status: report.outcome.status().to_string(),
            ..JsonReport::default()
        };
        let verdicts: Vec<bool> = match &report.outcome {
            Outcome::Sat(s) => {
                out.flags = s.model.iter().map(|(f, &v)| (f.to_string(), v)).collect();
                out.variables_up = render(&s.bindings_up);
                out.variables_down = render(&s.bindings_down);
                out.dead_variants = s.dead_variants.clone();
                s.verification.clone()
            }
            _ => vec![false; problem.constraints.len()],
        };
        out.constraints = problem
            .constraints
            .iter()
            .zip(verdicts)
            .map(|(c, verified)| ConstraintStatus {
                origin: c.origin.clone(),
                verified,
            })
            .collect();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Per component and channel: which variants stay enabled and what the tail
/// variables resolve to.
pub fn text_report(graph: &NetGraph, problem: &Problem, report: &SolveReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "status: {}", report.outcome.status());
    let s = match &report.outcome {
        Outcome::Sat(s) => s,
        Outcome::Unsat { origin } => {
            if let Some(o) = origin {
                let _ = writeln!(out, "contradiction at: {o}");
            }
            return out;
        }
        Outcome::BoundExceeded => {
            let _ = writeln!(out, "no fixed point after {} iterations", report.iterations);
            return out;
        }
    };
    let flags: Vec<String> = s.model.iter().map(|(f, v)| format!("{f}={v}")).collect();
    let _ = writeln!(out, "flags: {}", flags.join(" "));
    for c in &graph.components {
        let _ = writeln!(out, "component {}", c.name);
        for (dir, chans) in [("in", &c.in_channels), ("out", &c.out_channels)] {
            for (n, t) in chans {
                let Term::Choice(coll) = t else { continue };
                let mut parts = Vec::new();
                for e in &coll.entries {
                    let on = e.guard.eval(&s.model).unwrap_or(false);
                    parts.push(format!("{} {}", e.label, if on { "enabled" } else { "disabled" }));
                }
                let _ = writeln!(out, "  {dir} {n}: {}", parts.join(", "));
            }
        }
        let prefix = format!("{}.", c.name);
        for (v, t) in s.bindings_up.iter().filter(|(v, _)| v.starts_with(&prefix)) {
            let _ = writeln!(out, "  $^{v} = {t}");
        }
        for (v, t) in s.bindings_down.iter().filter(|(v, _)| v.starts_with(&prefix)) {
            let _ = writeln!(out, "  $_{v} = {t}");
        }
    }
    if !s.dead_variants.is_empty() {
        let _ = writeln!(out, "dead variants: {}", s.dead_variants.join(", "));
    }
    let failed = s.verification.iter().filter(|ok| !**ok).count();
    let _ = writeln!(out, "constraints: {} verified, {failed} failed", problem.constraints.len() - failed);
    out
}
