//! Exhaustive all-interleavings exploration of a net's marking space.
//!
//! This runs the pure net semantics (guards, arc expressions, color rules)
//! with the clock frozen at zero and no engine constraints, firing each
//! enabled binding from a copy of the state. It is the reference for
//! scheduler-independent reachability, which the unfolded plain net must
//! reproduce.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::{vocab, RuleEvalOptions, RuleTrace, SpnModel};
use crate::rdf::{Graph, Term, Triple};
use crate::runtime::engine::{
    color_accepts, compute_plan, enumerate_bindings_in, RuntimeError,
};
use crate::runtime::marking::Marking;

/// Reachable markings with the firing edges between them.
#[derive(Debug, Clone)]
pub struct SpnReachability {
    pub initial: String,
    pub markings: BTreeSet<String>,
    /// Raw states behind the fingerprints, for projections onto a place
    /// subset.
    pub states: Vec<PlaceTokens>,
    /// (from-fingerprint, transition binding label, to-fingerprint).
    pub edges: Vec<(String, String, String)>,
    /// Set when the state bound stopped the search early.
    pub truncated: bool,
}

pub type PlaceTokens = BTreeMap<Term, BTreeSet<Term>>;

/// Fingerprints of the states restricted to a subset of places; how nets
/// with generated helper places are compared against the original.
pub fn projected_fingerprints(states: &[PlaceTokens], keep: &BTreeSet<Term>) -> BTreeSet<String> {
    states
        .iter()
        .map(|state| {
            let projected: PlaceTokens = state
                .iter()
                .filter(|(p, _)| keep.contains(*p))
                .map(|(p, t)| (p.clone(), t.clone()))
                .collect();
            fingerprint(&projected)
        })
        .collect()
}

/// BFS over markings reachable from the model's current containment state,
/// up to `bound` distinct markings.
pub fn explore_spn(
    model: &SpnModel,
    strict_colors: bool,
    bound: usize,
) -> Result<SpnReachability, RuntimeError> {
    let mut graph = model.graph.clone();
    // Freeze the clock at zero so tick-reading rules see a defined value.
    graph.insert(Triple::new(vocab::clock_node(), vocab::tick(), Term::integer(0)));

    let initial = Marking::from_graph(&graph, model);
    let initial_state: PlaceTokens = initial.places.clone();
    let initial_fp = fingerprint(&initial_state);

    let mut seen: BTreeSet<String> = BTreeSet::new();
    seen.insert(initial_fp.clone());
    let mut states: Vec<PlaceTokens> = vec![initial_state.clone()];
    let mut queue: VecDeque<PlaceTokens> = VecDeque::new();
    queue.push_back(initial_state);
    let mut edges = Vec::new();
    let mut truncated = false;
    let opts = RuleEvalOptions::default();

    while let Some(state) = queue.pop_front() {
        install_marking(&mut graph, model, &state);
        let from_fp = fingerprint(&state);

        for transition in model.transitions.values() {
            let mut trace = RuleTrace::default();
            let bindings =
                enumerate_bindings_in(model, &graph, transition, opts, &mut trace)?;
            for binding in bindings {
                let mut trace = RuleTrace::default();
                let Some(plan) =
                    compute_plan(model, &graph, transition, &binding, opts, &mut trace)?
                else {
                    continue;
                };

                // Mirror the runtime's set semantics: a firing that would
                // produce a token already in its destination is not taken.
                let consumed: BTreeSet<(Term, Term)> = plan.consumed.iter().cloned().collect();
                let duplicate = plan.produced.iter().any(|(p, tok)| {
                    state.get(p).is_some_and(|toks| toks.contains(tok))
                        && !consumed.contains(&(p.clone(), tok.clone()))
                });
                if duplicate {
                    continue;
                }
                if strict_colors {
                    let mut ok = true;
                    for (p, tok) in &plan.produced {
                        let mut trace = RuleTrace::default();
                        if !color_accepts(model, &graph, p, tok, opts, &mut trace)? {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        continue;
                    }
                }

                let mut next = state.clone();
                for (p, tok) in &plan.consumed {
                    next.entry(p.clone()).or_default().remove(tok);
                }
                for (p, tok) in &plan.produced {
                    next.entry(p.clone()).or_default().insert(tok.clone());
                }
                let to_fp = fingerprint(&next);
                edges.push((from_fp.clone(), binding.label(), to_fp.clone()));
                if !seen.contains(&to_fp) {
                    if seen.len() >= bound {
                        truncated = true;
                        continue;
                    }
                    seen.insert(to_fp);
                    states.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }

    edges.sort();
    edges.dedup();
    Ok(SpnReachability {
        initial: initial_fp,
        markings: seen,
        states,
        edges,
        truncated,
    })
}

fn install_marking(graph: &mut Graph, model: &SpnModel, state: &PlaceTokens) {
    let contains = vocab::ldp_contains();
    for place in model.places.keys() {
        let current: Vec<Triple> = graph
            .match_triples(Some(place), Some(&contains), None)
            .into_iter()
            .collect();
        for t in current {
            graph.remove(&t);
        }
    }
    for (place, tokens) in state {
        for tok in tokens {
            graph.insert(Triple::new(place.clone(), contains.clone(), tok.clone()));
        }
    }
}

pub(crate) fn fingerprint(state: &PlaceTokens) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for (place, tokens) in state {
        if tokens.is_empty() {
            continue;
        }
        let _ = write!(out, "{place}=[");
        for (i, tok) in tokens.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{tok}");
        }
        out.push_str("] ");
    }
    out.trim_end().to_string()
}
