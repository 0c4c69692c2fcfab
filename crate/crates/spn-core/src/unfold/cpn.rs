//! The plain colored net produced by unfolding, and reachability over it.
//!
//! Nothing here touches a graph: transitions carry explicit binding tables
//! whose rows say which (place, token) pairs must be present or absent,
//! what gets consumed and what gets produced. Negative conditions (a token
//! required absent) are the table form of inhibitor-style reads.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::rdf::Term;
use crate::runtime::{projected_fingerprints, PlaceTokens};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpnPlace {
    pub iri: Term,
    /// Finite, enumerated set of tokens this place may hold.
    pub colorset: BTreeSet<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CpnArcDirection {
    PlaceToTransition,
    TransitionToPlace,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CpnArc {
    pub place: Term,
    pub transition: Term,
    pub direction: CpnArcDirection,
    /// Fetch/return pairs introduced for latent connections.
    pub read: bool,
}

/// One admissible binding of a transition, fully tabulated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BindingRow {
    pub assignment: BTreeMap<String, Term>,
    /// Marking preconditions: the (place, token) pair must be present
    /// (`true`) or absent (`false`).
    pub requires: BTreeMap<(Term, Term), bool>,
    pub consumed: Vec<(Term, Term)>,
    pub produced: Vec<(Term, Term)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpnTransition {
    pub iri: Term,
    pub rows: Vec<BindingRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CpnNet {
    pub places: BTreeMap<Term, CpnPlace>,
    pub transitions: BTreeMap<Term, CpnTransition>,
    pub arcs: Vec<CpnArc>,
    pub initial: PlaceTokens,
}

impl CpnNet {
    pub fn row_count(&self) -> usize {
        self.transitions.values().map(|t| t.rows.len()).sum()
    }
}

/// Reachable CPN markings up to a state bound.
#[derive(Debug, Clone)]
pub struct ReachabilitySet {
    pub initial: String,
    pub markings: BTreeSet<String>,
    pub states: Vec<PlaceTokens>,
    /// (from, "transition + assignment", to)
    pub edges: Vec<(String, String, String)>,
    /// Set when the bound cut the search short; the returned set is the
    /// explored part.
    pub truncated: bool,
}

impl ReachabilitySet {
    /// Marking fingerprints after mapping away generated places.
    pub fn fingerprints_over(&self, keep: &BTreeSet<Term>) -> BTreeSet<String> {
        projected_fingerprints(&self.states, keep)
    }
}

fn row_enabled(row: &BindingRow, state: &PlaceTokens) -> bool {
    for ((place, token), must_be_present) in &row.requires {
        let present = state.get(place).is_some_and(|toks| toks.contains(token));
        if present != *must_be_present {
            return false;
        }
    }
    let consumed: BTreeSet<&(Term, Term)> = row.consumed.iter().collect();
    for pair @ (place, token) in &row.consumed {
        let _ = pair;
        if !state.get(place).is_some_and(|toks| toks.contains(token)) {
            return false;
        }
    }
    // Set semantics: a row that would produce a token already present (and
    // not simultaneously consumed) is not admissible.
    for pair @ (place, token) in &row.produced {
        if state.get(place).is_some_and(|toks| toks.contains(token)) && !consumed.contains(pair) {
            return false;
        }
    }
    true
}

fn apply_row(row: &BindingRow, state: &PlaceTokens) -> PlaceTokens {
    let mut next = state.clone();
    for (place, token) in &row.consumed {
        next.entry(place.clone()).or_default().remove(token);
    }
    for (place, token) in &row.produced {
        next.entry(place.clone()).or_default().insert(token.clone());
    }
    next
}

/// BFS over markings, up to `bound` distinct states (`bound >= 1`).
pub fn explore(net: &CpnNet, bound: usize) -> ReachabilitySet {
    assert!(bound >= 1, "exploration bound must be at least 1");
    let mut initial: PlaceTokens = net
        .places
        .keys()
        .map(|p| (p.clone(), net.initial.get(p).cloned().unwrap_or_default()))
        .collect();
    // Tolerate initial tokens on places missing from the place list.
    for (p, toks) in &net.initial {
        initial.entry(p.clone()).or_insert_with(|| toks.clone());
    }

    let initial_fp = fingerprint(&initial);
    let mut seen = BTreeSet::from([initial_fp.clone()]);
    let mut states = vec![initial.clone()];
    let mut queue = VecDeque::from([initial]);
    let mut edges = Vec::new();
    let mut truncated = false;

    while let Some(state) = queue.pop_front() {
        let from = fingerprint(&state);
        for transition in net.transitions.values() {
            for row in &transition.rows {
                if !row_enabled(row, &state) {
                    continue;
                }
                let next = apply_row(row, &state);
                let to = fingerprint(&next);
                edges.push((from.clone(), row_label(&transition.iri, row), to.clone()));
                if !seen.contains(&to) {
                    if seen.len() >= bound {
                        truncated = true;
                        continue;
                    }
                    seen.insert(to);
                    states.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }

    edges.sort();
    edges.dedup();
    ReachabilitySet {
        initial: initial_fp,
        markings: seen,
        states,
        edges,
        truncated,
    }
}

fn row_label(transition: &Term, row: &BindingRow) -> String {
    let mut out = transition.to_string();
    for (name, term) in &row.assignment {
        out.push_str(&format!(" {name}={term}"));
    }
    out
}

pub(crate) fn fingerprint(state: &PlaceTokens) -> String {
    crate::runtime::state_fingerprint(state)
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PlaceExport {
    iri: String,
    colorset: Vec<String>,
    initial: Vec<String>,
}

#[derive(Serialize)]
struct RowExport {
    assignment: BTreeMap<String, String>,
    requires: Vec<(String, String, bool)>,
    consumed: Vec<(String, String)>,
    produced: Vec<(String, String)>,
}

#[derive(Serialize)]
struct TransitionExport {
    iri: String,
    rows: Vec<RowExport>,
}

#[derive(Serialize)]
struct ArcExport {
    place: String,
    transition: String,
    direction: String,
    read: bool,
}

#[derive(Serialize)]
struct NetExport {
    places: Vec<PlaceExport>,
    transitions: Vec<TransitionExport>,
    arcs: Vec<ArcExport>,
}

/// JSON export: places with enumerated colorsets and initial tokens,
/// transitions with their binding tables, arcs. Field order and entry
/// order are canonical.
pub fn export_cpn_json(net: &CpnNet) -> String {
    let export = NetExport {
        places: net
            .places
            .values()
            .map(|p| PlaceExport {
                iri: p.iri.to_string(),
                colorset: p.colorset.iter().map(Term::to_string).collect(),
                initial: net
                    .initial
                    .get(&p.iri)
                    .map(|toks| toks.iter().map(Term::to_string).collect())
                    .unwrap_or_default(),
            })
            .collect(),
        transitions: net
            .transitions
            .values()
            .map(|t| TransitionExport {
                iri: t.iri.to_string(),
                rows: t
                    .rows
                    .iter()
                    .map(|r| RowExport {
                        assignment: r
                            .assignment
                            .iter()
                            .map(|(k, v)| (k.clone(), v.to_string()))
                            .collect(),
                        requires: r
                            .requires
                            .iter()
                            .map(|((p, tok), present)| {
                                (p.to_string(), tok.to_string(), *present)
                            })
                            .collect(),
                        consumed: r
                            .consumed
                            .iter()
                            .map(|(p, tok)| (p.to_string(), tok.to_string()))
                            .collect(),
                        produced: r
                            .produced
                            .iter()
                            .map(|(p, tok)| (p.to_string(), tok.to_string()))
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
        arcs: net
            .arcs
            .iter()
            .map(|a| ArcExport {
                place: a.place.to_string(),
                transition: a.transition.to_string(),
                direction: match a.direction {
                    CpnArcDirection::PlaceToTransition => "P2T".to_string(),
                    CpnArcDirection::TransitionToPlace => "T2P".to_string(),
                },
                read: a.read,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&export).expect("net export always serializes")
}

/// Node/edge lists of a reachability set as JSON.
pub fn export_reachability_json(set: &ReachabilitySet) -> String {
    #[derive(Serialize)]
    struct ReachExport<'a> {
        initial: &'a str,
        truncated: bool,
        markings: Vec<&'a str>,
        edges: &'a [(String, String, String)],
    }
    let export = ReachExport {
        initial: &set.initial,
        truncated: set.truncated,
        markings: set.markings.iter().map(String::as_str).collect(),
        edges: &set.edges,
    };
    serde_json::to_string_pretty(&export).expect("reachability export always serializes")
}
