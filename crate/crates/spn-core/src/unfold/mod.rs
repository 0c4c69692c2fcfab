//! Three-step conversion of a net with latent semantic connections into a
//! plain colored net, plus reachability over the result.
//!
//! Step 1 pulls mutable domain facts inside the net as mirror containers
//! with explicit edit transitions. Step 2 turns the remote places a rule
//! can read into explicit fetch/return arc pairs. Step 3 replaces every
//! rule by an enumerated admissible-binding table. After that the net's
//! behavior is table-driven: no transition consults the graph.

mod cpn;
mod explicate;
mod internalize;
mod tabulate;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{vocab, LoadError, Rule, RuleError, RuleEvalOptions, RuleTrace, SparqlLeaf,
    SpnModel, TransitionDef, SELF_VAR};
use crate::rdf::{Graph, Term, Triple};
use crate::runtime::RuntimeError;
use crate::sparql::{self, PatternTerm, Query, Solution};

pub use cpn::{
    explore, export_cpn_json, export_reachability_json, BindingRow, CpnArc, CpnArcDirection,
    CpnNet, CpnPlace, CpnTransition, ReachabilitySet,
};
pub use explicate::explicate_connections;
pub use internalize::{internalize_domain, MutableDeclaration};
pub use tabulate::tabulate_rules;

#[derive(Debug, Error)]
pub enum UnfoldError {
    #[error("rule {rule} reads mutable predicate {predicate}: {reason}")]
    NonInternalizable {
        rule: Term,
        predicate: Term,
        reason: String,
    },
    #[error("vocabulary has {size} terms, above the bound of {bound}")]
    VocabBoundExceeded { size: usize, bound: usize },
    #[error("tabulating {transition} is too large: {detail}")]
    TabulationTooLarge { transition: Term, detail: String },
    #[error("mutable-predicate declaration, line {line}: {message}")]
    Declaration { line: usize, message: String },
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

/// The whole pipeline: internalize, explicate, tabulate.
pub fn unfold(
    model: &SpnModel,
    declaration: &MutableDeclaration,
    vocab_bound: usize,
) -> Result<CpnNet, UnfoldError> {
    let internalized = internalize_domain(model, declaration)?;
    let explicated = explicate_connections(&internalized)?;
    tabulate_rules(&explicated, vocab_bound)
}

// ---------------------------------------------------------------------------
// Shared machinery
// ---------------------------------------------------------------------------

pub(crate) fn collect_leaves<'a>(rule: &'a Rule, out: &mut Vec<&'a SparqlLeaf>) {
    match rule {
        Rule::Sparql(leaf) => out.push(leaf),
        Rule::Constant(_) => {}
        Rule::Compound { subs, .. } => {
            for sub in subs {
                collect_leaves(sub, out);
            }
        }
        Rule::Condition {
            condition,
            then_rule,
            else_rule,
        } => {
            for r in [condition, then_rule, else_rule] {
                collect_leaves(r, out);
            }
        }
    }
}

/// Every SPARQL leaf a transition's behavior depends on, paired with the
/// node that owns it (bound to `?SELF` during evaluation).
pub(crate) fn transition_leaves<'a>(
    model: &'a SpnModel,
    t: &'a TransitionDef,
) -> Vec<(Term, &'a SparqlLeaf)> {
    let mut out = Vec::new();
    if let Some(guard) = &t.guard {
        let mut leaves = Vec::new();
        collect_leaves(guard, &mut leaves);
        out.extend(leaves.into_iter().map(|l| (t.iri.clone(), l)));
    }
    for arc in model.arcs.values() {
        if arc.transition != t.iri || arc.read_only {
            continue;
        }
        if let Some(expr) = &arc.expr {
            let mut leaves = Vec::new();
            collect_leaves(expr, &mut leaves);
            out.extend(leaves.into_iter().map(|l| (arc.iri.clone(), l)));
        }
    }
    out
}

/// Per-place finite colorsets: IRI and blank-node vocabulary terms, kept
/// when the place's color rule (if any) accepts them against the initial
/// graph, plus whatever the place already contains.
pub(crate) fn colorsets(
    model: &SpnModel,
) -> Result<BTreeMap<Term, BTreeSet<Term>>, UnfoldError> {
    let candidates: BTreeSet<Term> = model
        .vocabulary()
        .into_iter()
        .filter(|t| !t.is_literal())
        .collect();
    let mut graph = model.graph.clone();
    graph.insert(Triple::new(
        vocab::clock_node(),
        vocab::tick(),
        Term::integer(0),
    ));
    let opts = RuleEvalOptions::default();

    let mut out = BTreeMap::new();
    for place in model.places.values() {
        let mut set = BTreeSet::new();
        for tok in &candidates {
            let mut trace = RuleTrace::default();
            let accepted = crate::runtime::color_accepts(
                model,
                &graph,
                &place.iri,
                tok,
                opts,
                &mut trace,
            )?;
            if accepted {
                set.insert(tok.clone());
            }
        }
        set.extend(model.tokens_of(&place.iri));
        out.insert(place.iri.clone(), set);
    }
    Ok(out)
}

/// The graph with every place saturated to its full colorset: any
/// containment triple a rule could ever match is present.
pub(crate) fn saturate(model: &SpnModel, colors: &BTreeMap<Term, BTreeSet<Term>>) -> Graph {
    let contains = vocab::ldp_contains();
    let mut g = model.graph.clone();
    g.insert(Triple::new(
        vocab::clock_node(),
        vocab::tick(),
        Term::integer(0),
    ));
    for (place, set) in colors {
        for tok in set {
            g.insert(Triple::new(place.clone(), contains.clone(), tok.clone()));
        }
    }
    g
}

/// Per-assignment atom cap for tabulation: each atom doubles the number of
/// hypothetical markings evaluated.
pub(crate) const MAX_ATOMS: usize = 16;
/// Looser cap for connection discovery, where arguments are still free.
pub(crate) const MAX_DISCOVERY_ATOMS: usize = 4096;
const MAX_DISCOVERY_SOLUTIONS: usize = 500_000;

/// The (place, token) containment pairs a query can touch, found by
/// matching its patterns against the saturated graph under `pre`.
/// Variables not in `pre` range freely, so the result covers every binding
/// that extends it.
pub(crate) fn touchable_atoms(
    model: &SpnModel,
    saturated: &Graph,
    query: &Query,
    pre: &Solution,
    context: &Term,
    max_atoms: usize,
) -> Result<BTreeSet<(Term, Term)>, UnfoldError> {
    let contains = vocab::ldp_contains();
    let (patterns, filters) =
        sparql::substitute(&query.pattern.patterns, &query.pattern.filters, pre);
    let flat = sparql::expand_paths(&patterns);
    let watched: Vec<usize> = flat
        .iter()
        .enumerate()
        .filter(|(_, f)| match &f.p {
            PatternTerm::Term(t) => *t == contains,
            // A variable predicate can bind the containment predicate.
            PatternTerm::Var(_) => true,
        })
        .map(|(i, _)| i)
        .collect();
    if watched.is_empty() {
        return Ok(BTreeSet::new());
    }

    let mut atoms: BTreeSet<(Term, Term)> = BTreeSet::new();
    let mut visited = 0usize;
    let mut overflow = false;
    sparql::visit_solutions(saturated, &flat, &filters, &mut |sol| {
        visited += 1;
        if visited > MAX_DISCOVERY_SOLUTIONS {
            overflow = true;
            return std::ops::ControlFlow::Break(());
        }
        for &i in &watched {
            let f = &flat[i];
            if let PatternTerm::Var(v) = &f.p {
                if sol.get(v) != Some(&contains) {
                    continue;
                }
            }
            let resolve = |pt: &PatternTerm| -> Option<Term> {
                match pt {
                    PatternTerm::Term(t) => Some(t.clone()),
                    PatternTerm::Var(v) => sol.get(v).cloned(),
                }
            };
            if let (Some(place), Some(token)) = (resolve(&f.s), resolve(&f.o)) {
                if model.places.contains_key(&place) {
                    atoms.insert((place, token));
                    if atoms.len() > max_atoms {
                        overflow = true;
                        return std::ops::ControlFlow::Break(());
                    }
                }
            }
        }
        std::ops::ControlFlow::Continue(())
    });
    if overflow {
        return Err(UnfoldError::TabulationTooLarge {
            transition: context.clone(),
            detail: format!(
                "rule touches more than {max_atoms} containment pairs or over \
                 {MAX_DISCOVERY_SOLUTIONS} pattern solutions"
            ),
        });
    }
    Ok(atoms)
}

/// Pre-binding for a rule owned by `owner`, extending a transition binding.
pub(crate) fn owner_binding(pre: &Solution, owner: &Term) -> Solution {
    let mut bound = pre.clone();
    bound.set(SELF_VAR, owner.clone());
    bound
}
