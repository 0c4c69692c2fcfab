//! Firing records and the newline-delimited event log.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::Serialize;

use crate::rdf::Term;

/// One firing: which transition, under which binding, at which tick, and
/// the (place, token) pairs it consumed and produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiringRecord {
    pub tick: u64,
    pub transition: Term,
    /// Arg name (with `?`) to bound term.
    pub binding: BTreeMap<String, Term>,
    pub consumed: Vec<(Term, Term)>,
    pub produced: Vec<(Term, Term)>,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    tick: u64,
    transition: String,
    binding: BTreeMap<&'a str, String>,
    consumed: Vec<[String; 2]>,
    produced: Vec<[String; 2]>,
}

impl FiringRecord {
    /// One JSON object per line; terms in N-Triples syntax. Key order and
    /// pair order are canonical, so identical runs serialize identically.
    pub fn to_json_line(&self) -> String {
        let record = JsonRecord {
            tick: self.tick,
            transition: self.transition.to_string(),
            binding: self
                .binding
                .iter()
                .map(|(k, v)| (k.as_str(), v.to_string()))
                .collect(),
            consumed: self
                .consumed
                .iter()
                .map(|(p, t)| [p.to_string(), t.to_string()])
                .collect(),
            produced: self
                .produced
                .iter()
                .map(|(p, t)| [p.to_string(), t.to_string()])
                .collect(),
        };
        serde_json::to_string(&record).expect("event records always serialize")
    }
}

pub fn render_event_log(events: &[FiringRecord]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_json_line());
        out.push('\n');
    }
    out
}

/// Counters for a finished run. `wall_time` is informational and excluded
/// from the canonical report so identical runs produce identical bytes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub ticks_elapsed: u64,
    /// Whole guard-tree evaluations (one per enabledness check).
    pub rule_checks: u64,
    /// Individual SPARQL/constant leaf evaluations, across all rules.
    pub leaf_rule_checks: u64,
    pub firings: u64,
    pub per_transition_firings: BTreeMap<Term, u64>,
    pub per_place_final_tokens: BTreeMap<Term, u64>,
    pub wall_time: Duration,
}

impl RunStats {
    /// Deterministic text report.
    pub fn report(&self) -> String {
        let mut out = String::new();
        use fmt::Write;
        let _ = writeln!(out, "ticks_elapsed: {}", self.ticks_elapsed);
        let _ = writeln!(out, "rule_checks: {}", self.rule_checks);
        let _ = writeln!(out, "leaf_rule_checks: {}", self.leaf_rule_checks);
        let _ = writeln!(out, "firings: {}", self.firings);
        for (t, n) in &self.per_transition_firings {
            let _ = writeln!(out, "transition {t} fired {n}");
        }
        for (p, n) in &self.per_place_final_tokens {
            let _ = writeln!(out, "place {p} holds {n}");
        }
        out
    }
}

/// Per-tick summary from the scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TickReport {
    pub firings: u64,
    pub rule_checks: u64,
    /// True when the whole tick fired nothing.
    pub quiescent: bool,
}
