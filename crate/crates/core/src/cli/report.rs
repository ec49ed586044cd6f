use serde::{Deserialize, Serialize};

use crate::checker::{StableReport, Verdict};
use crate::diag::Diagnostic;
use crate::model::{Network, State};
use crate::symbolic::EngineStats;

/// Structured result of one command. Counts are decimal strings so that
/// arbitrarily large values survive any JSON reader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub genes: Vec<String>,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineStats>,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            exit_code: 0,
            network: None,
            genes: Vec::new(),
            diagnostics: Vec::new(),
            result: None,
            error: None,
            engine: None,
            wall_time_ms: 0.0,
        }
    }

    pub fn set_network(&mut self, net: &Network) {
        self.network = Some(net.name().to_string());
        self.genes = net.genes().iter().map(|g| g.name.clone()).collect();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Copy with the wall time zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        Report {
            wall_time_ms: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Validate {
        errors: usize,
        warnings: usize,
    },
    Compile {
        format: String,
        places: usize,
        transitions: usize,
    },
    Check {
        query: String,
        holds: bool,
        reachable_count: String,
        satisfying_reachable_count: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        evidence: Option<Vec<State>>,
    },
    Count {
        reachable_count: String,
    },
    Stable {
        count: String,
        states: Vec<State>,
        truncated: bool,
    },
    Stats {
        genes: usize,
        edges: usize,
        rules: usize,
        places: usize,
        transitions: usize,
        reachable_count: String,
        peak_nodes: usize,
        fixpoint_rounds: u64,
    },
}

impl Outcome {
    pub fn check(query: String, v: &Verdict, with_evidence: bool) -> Self {
        Outcome::Check {
            query,
            holds: v.holds,
            reachable_count: v.reachable_count.to_string(),
            satisfying_reachable_count: v.satisfying_reachable_count.to_string(),
            evidence: if with_evidence { v.evidence.clone() } else { None },
        }
    }

    pub fn stable(r: &StableReport) -> Self {
        Outcome::Stable {
            count: r.count.to_string(),
            states: r.states.clone(),
            truncated: r.truncated(),
        }
    }
}

pub(crate) fn plural(n: impl std::fmt::Display, one: &str, many: &str) -> String {
    let text = n.to_string();
    if text == "1" {
        format!("{text} {one}")
    } else {
        format!("{text} {many}")
    }
}

/// Human-readable rendering of a successful outcome.
pub fn render_text(report: &Report, net: Option<&Network>) -> String {
    let fmt_state = |s: &State| match net {
        Some(n) => n.format_state(s),
        None => format!("{:?}", s.levels()),
    };
    let mut out = String::new();
    match &report.result {
        None => {}
        Some(Outcome::Validate { errors, warnings }) => {
            out += &format!(
                "{}, {}\n",
                plural(errors, "error", "errors"),
                plural(warnings, "warning", "warnings")
            );
        }
        Some(Outcome::Compile { .. }) => {}
        Some(Outcome::Check {
            query,
            holds,
            reachable_count,
            satisfying_reachable_count,
            evidence,
        }) => {
            out += &format!("{query}: {}\n", if *holds { "holds" } else { "fails" });
            out += &format!("reachable states: {reachable_count}\n");
            out += &format!("satisfying reachable states: {satisfying_reachable_count}\n");
            if let Some(path) = evidence {
                let label = if *holds { "witness" } else { "counterexample" };
                out += &format!("{label} ({}):\n", plural(path.len(), "state", "states"));
                for s in path {
                    out += &fmt_state(s);
                    out.push('\n');
                }
            }
        }
        Some(Outcome::Count { reachable_count }) => {
            out += &format!("{}\n", plural(reachable_count, "reachable state", "reachable states"));
        }
        Some(Outcome::Stable {
            count,
            states,
            truncated,
        }) => {
            out += &plural(count, "stable state", "stable states");
            if !states.is_empty() {
                let listed: Vec<String> = states.iter().map(fmt_state).collect();
                out += ": ";
                out += &listed.join("; ");
            }
            if *truncated {
                out += &format!(" (first {} listed)", states.len());
            }
            out.push('\n');
        }
        Some(Outcome::Stats {
            genes,
            edges,
            rules,
            places,
            transitions,
            reachable_count,
            peak_nodes,
            fixpoint_rounds,
        }) => {
            out += &format!("genes: {genes}\nedges: {edges}\nrules: {rules}\n");
            out += &format!("places: {places}\ntransitions: {transitions}\n");
            out += &format!("reachable states: {reachable_count}\n");
            out += &format!("peak MDD nodes: {peak_nodes}\nfixpoint rounds: {fixpoint_rounds}\n");
        }
    }
    out
}
