//! Step 3: replace rules by enumerated admissible-binding tables.
//!
//! For every assignment of colorset tokens to a transition's arguments, the
//! containment pairs its rules can read are enumerated, and the rules are
//! evaluated under every combination of those pairs being present or
//! absent. Each combination where the guard holds becomes one table row
//! with the consumed and produced tokens computed for exactly that
//! hypothetical marking. The finite vocabulary makes the enumeration
//! exhaustive; efficient unfolding strategies are out of scope here.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{vocab, Rule, RuleEvalOptions, RuleTrace, SpnModel, TransitionDef};
use crate::rdf::{Graph, Term, Triple};
use crate::runtime::{color_accepts, compute_plan_with, TransitionBinding};
use crate::sparql::QueryForm;
use crate::unfold::cpn::{BindingRow, CpnArc, CpnArcDirection, CpnNet, CpnPlace, CpnTransition};
use crate::unfold::{colorsets, owner_binding, saturate, touchable_atoms, transition_leaves,
    UnfoldError};

const MAX_ASSIGNMENTS: usize = 20_000;
const MAX_ROWS: usize = 200_000;

pub fn tabulate_rules(model: &SpnModel, vocab_bound: usize) -> Result<CpnNet, UnfoldError> {
    let vocab_size = model.vocabulary().len();
    if vocab_size > vocab_bound {
        return Err(UnfoldError::VocabBoundExceeded {
            size: vocab_size,
            bound: vocab_bound,
        });
    }

    let colors = colorsets(model)?;
    let saturated = saturate(model, &colors);
    let base = base_graph(model);
    let opts = RuleEvalOptions::default();

    let mut transitions = BTreeMap::new();
    for t in model.transitions.values() {
        let rows = tabulate_transition(model, t, &colors, &saturated, &base, opts)?;
        transitions.insert(
            t.iri.clone(),
            CpnTransition {
                iri: t.iri.clone(),
                rows,
            },
        );
    }

    let places: BTreeMap<Term, CpnPlace> = colors
        .iter()
        .map(|(iri, colorset)| {
            (
                iri.clone(),
                CpnPlace {
                    iri: iri.clone(),
                    colorset: colorset.clone(),
                },
            )
        })
        .collect();
    let arcs: Vec<CpnArc> = model
        .arcs
        .values()
        .map(|a| CpnArc {
            place: a.place.clone(),
            transition: a.transition.clone(),
            direction: match a.direction {
                crate::model::ArcDirection::PlaceToTransition => {
                    CpnArcDirection::PlaceToTransition
                }
                crate::model::ArcDirection::TransitionToPlace => {
                    CpnArcDirection::TransitionToPlace
                }
            },
            read: a.read_only,
        })
        .collect();
    let initial = model
        .places
        .keys()
        .map(|p| (p.clone(), model.tokens_of(p)))
        .collect();

    Ok(CpnNet {
        places,
        transitions,
        arcs,
        initial,
    })
}

/// The graph with every place's containment stripped and the clock frozen:
/// the frozen-fact backdrop that hypothetical markings are laid over.
fn base_graph(model: &SpnModel) -> Graph {
    let contains = vocab::ldp_contains();
    let mut g = model.graph.clone();
    for place in model.places.keys() {
        let current: Vec<Triple> = g
            .match_triples(Some(place), Some(&contains), None)
            .into_iter()
            .collect();
        for t in current {
            g.remove(&t);
        }
    }
    g.insert(Triple::new(
        vocab::clock_node(),
        vocab::tick(),
        Term::integer(0),
    ));
    g
}

fn tabulate_transition(
    model: &SpnModel,
    t: &TransitionDef,
    colors: &BTreeMap<Term, BTreeSet<Term>>,
    saturated: &Graph,
    base: &Graph,
    opts: RuleEvalOptions,
) -> Result<Vec<BindingRow>, UnfoldError> {
    let rdf_type = vocab::rdf_type();
    // Candidates per argument, drawn from input-place colorsets or, for
    // generated arguments, from the output arc's SELECT over the saturated
    // graph.
    let mut per_arg: Vec<(String, Vec<Term>)> = Vec::new();
    for arg in &t.args {
        let mut candidates: BTreeSet<Term> = BTreeSet::new();
        let mut sourced = false;
        for arc in model.input_arcs(&t.iri) {
            if arc.read_only || !arc.args.iter().any(|a| a.name == arg.name) {
                continue;
            }
            sourced = true;
            if let Some(set) = colors.get(&arc.place) {
                candidates.extend(set.iter().cloned());
            }
        }
        if !sourced {
            for arc in model.output_arcs(&t.iri) {
                if !arc.args.iter().any(|a| a.name == arg.name) {
                    continue;
                }
                let Some(expr) = arc.expr.as_ref() else {
                    continue;
                };
                let Rule::Sparql(leaf) = expr else {
                    continue;
                };
                let QueryForm::Select { vars, .. } = &leaf.query.form else {
                    continue;
                };
                if vars.first().map(String::as_str) != Some(arg.bare_name()) {
                    continue;
                }
                let mut trace = RuleTrace::default();
                candidates.extend(crate::model::eval_rule_tokens(
                    expr,
                    saturated,
                    &crate::sparql::Solution::new(),
                    &arc.iri,
                    opts,
                    &mut trace,
                )?);
                sourced = true;
            }
        }
        if !arg.allowed_types.is_empty() {
            candidates.retain(|tok| {
                arg.allowed_types.iter().any(|ty| {
                    base.contains(&Triple::new(tok.clone(), rdf_type.clone(), ty.clone()))
                })
            });
        }
        let _ = sourced;
        per_arg.push((arg.name.clone(), candidates.into_iter().collect()));
    }

    let mut assignments: Vec<BTreeMap<String, Term>> = vec![BTreeMap::new()];
    for (name, candidates) in &per_arg {
        let mut next = Vec::with_capacity(assignments.len() * candidates.len().max(1));
        for partial in &assignments {
            for tok in candidates {
                if next.len() + assignments.len() > MAX_ASSIGNMENTS {
                    return Err(UnfoldError::TabulationTooLarge {
                        transition: t.iri.clone(),
                        detail: format!("more than {MAX_ASSIGNMENTS} candidate assignments"),
                    });
                }
                let mut a = partial.clone();
                a.insert(name.clone(), tok.clone());
                next.push(a);
            }
        }
        assignments = next;
    }

    let leaves = transition_leaves(model, t);
    let mut rows: BTreeSet<BindingRow> = BTreeSet::new();
    let mut working = base.clone();
    let contains = vocab::ldp_contains();

    for assignment in assignments {
        let binding = TransitionBinding {
            transition: t.iri.clone(),
            assignment: assignment.clone(),
        };
        let pre = binding.solution();

        let mut atoms: BTreeSet<(Term, Term)> = BTreeSet::new();
        for (owner, leaf) in &leaves {
            let bound = owner_binding(&pre, owner);
            atoms.extend(touchable_atoms(
                model,
                saturated,
                &leaf.query,
                &bound,
                &t.iri,
                super::MAX_ATOMS,
            )?);
        }
        let atom_vec: Vec<(Term, Term)> = atoms.into_iter().collect();
        if atom_vec.len() > super::MAX_ATOMS {
            return Err(UnfoldError::TabulationTooLarge {
                transition: t.iri.clone(),
                detail: format!(
                    "{} containment atoms for one assignment (cap {})",
                    atom_vec.len(),
                    super::MAX_ATOMS
                ),
            });
        }

        for mask in 0u32..(1u32 << atom_vec.len()) {
            let mut inserted = Vec::new();
            for (i, (place, tok)) in atom_vec.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    let triple =
                        Triple::new(place.clone(), contains.clone(), tok.clone());
                    if working.insert(triple.clone()) {
                        inserted.push(triple);
                    }
                }
            }

            let mut trace = RuleTrace::default();
            let plan = compute_plan_with(model, &working, t, &binding, opts, &mut trace, false);
            let row = match plan {
                Ok(Some(plan)) => {
                    let requires: BTreeMap<(Term, Term), bool> = atom_vec
                        .iter()
                        .enumerate()
                        .map(|(i, atom)| (atom.clone(), mask & (1 << i) != 0))
                        .collect();
                    let consumed_set: BTreeSet<&(Term, Term)> = plan.consumed.iter().collect();
                    // Rows contradicting their own valuation can never
                    // fire: consuming a required-absent pair, or producing
                    // a required-present one it does not also consume.
                    let contradictory = plan
                        .consumed
                        .iter()
                        .any(|pair| requires.get(pair) == Some(&false))
                        || plan.produced.iter().any(|pair| {
                            requires.get(pair) == Some(&true) && !consumed_set.contains(pair)
                        });
                    let mut color_ok = true;
                    for (place, tok) in &plan.produced {
                        let mut trace = RuleTrace::default();
                        if !color_accepts(model, &working, place, tok, opts, &mut trace)? {
                            color_ok = false;
                            break;
                        }
                    }
                    if contradictory || !color_ok {
                        None
                    } else {
                        Some(BindingRow {
                            assignment: assignment.clone(),
                            requires,
                            consumed: plan.consumed,
                            produced: plan.produced,
                        })
                    }
                }
                Ok(None) => None,
                Err(e) => {
                    for triple in &inserted {
                        working.remove(triple);
                    }
                    return Err(e.into());
                }
            };
            for triple in &inserted {
                working.remove(triple);
            }
            if let Some(row) = row {
                rows.insert(row);
                if rows.len() > MAX_ROWS {
                    return Err(UnfoldError::TabulationTooLarge {
                        transition: t.iri.clone(),
                        detail: format!("more than {MAX_ROWS} table rows"),
                    });
                }
            }
        }
    }

    Ok(rows.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_model;
    use crate::rdf::parse_turtle;
    use crate::runtime::{explore_spn, projected_fingerprints};
    use crate::unfold::{explore, unfold, MutableDeclaration};

    fn model(doc: &str) -> SpnModel {
        load_model(parse_turtle(doc, None).unwrap()).unwrap()
    }

    #[test]
    fn guardless_transition_over_two_tokens_has_two_rows() {
        let doc = r#"
proj:src a spn:Place; ldp:contains proj:a, proj:b.
proj:dst a spn:Place.
proj:t a spn:Transition; spn:hasArg "?X".
proj:in a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:t; spn:hasArg "?X".
proj:out a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:t; spn:hasArg "?X".
"#;
        let net = tabulate_rules(&model(doc), 100).unwrap();
        let t = net
            .transitions
            .get(&Term::iri("http://example.org/proj#t"))
            .unwrap();
        // Colorsets make every vocabulary resource a candidate, but the
        // guardless move just consumes the assigned token; rows collapse by
        // value. Two of them involve the actual tokens.
        assert!(t
            .rows
            .iter()
            .any(|r| r.assignment["?X"] == Term::iri("http://example.org/proj#a")));
        assert!(t
            .rows
            .iter()
            .any(|r| r.assignment["?X"] == Term::iri("http://example.org/proj#b")));
        assert!(t.rows.iter().all(|r| r.requires.is_empty()));
    }

    #[test]
    fn vocab_bound_is_enforced() {
        let doc = "proj:p a spn:Place; ldp:contains proj:x.";
        let err = tabulate_rules(&model(doc), 2).unwrap_err();
        assert!(matches!(err, UnfoldError::VocabBoundExceeded { .. }));
    }

    #[test]
    fn remote_guard_becomes_requires_entries() {
        let doc = r#"
proj:src a spn:Place; ldp:contains proj:tok.
proj:dst a spn:Place.
proj:lock a spn:Place; ldp:contains proj:key.
proj:t a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:g.
proj:g a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:lock ldp:contains proj:key }".
proj:in a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:t; spn:hasArg "?X".
proj:out a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:t; spn:hasArg "?X".
"#;
        let net = tabulate_rules(&model(doc), 100).unwrap();
        let t = net
            .transitions
            .get(&Term::iri("http://example.org/proj#t"))
            .unwrap();
        let lock = Term::iri("http://example.org/proj#lock");
        let key = Term::iri("http://example.org/proj#key");
        assert!(!t.rows.is_empty());
        for row in &t.rows {
            assert_eq!(row.requires.get(&(lock.clone(), key.clone())), Some(&true));
        }
    }

    #[test]
    fn unfolded_reachability_matches_exhaustive_runtime() {
        let doc = r#"
proj:src a spn:Place; ldp:contains proj:tok.
proj:mid a spn:Place.
proj:dst a spn:Place.
proj:lock a spn:Place; ldp:contains proj:key.
proj:unlock a spn:Transition; spn:hasArg "?K".
proj:li a spn:ArcP2T; spn:relPlace proj:lock; spn:relTransition proj:unlock; spn:hasArg "?K".
proj:t1 a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:g1.
proj:g1 a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:lock ldp:contains proj:key }".
proj:i1 a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:t1; spn:hasArg "?X".
proj:o1 a spn:ArcT2P; spn:relPlace proj:mid; spn:relTransition proj:t1; spn:hasArg "?X".
proj:t2 a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:g2.
proj:g2 a spn:CompoundRule; spn:operator "NOT"; spn:subRule proj:g2s.
proj:g2s a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:lock ldp:contains proj:key }".
proj:i2 a spn:ArcP2T; spn:relPlace proj:mid; spn:relTransition proj:t2; spn:hasArg "?X".
proj:o2 a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:t2; spn:hasArg "?X".
"#;
        let m = model(doc);
        let spn_reach = explore_spn(&m, true, 10_000).unwrap();
        let net = unfold(&m, &MutableDeclaration::empty(), 100).unwrap();
        let cpn_reach = explore(&net, 10_000);
        let keep: BTreeSet<Term> = m.places.keys().cloned().collect();
        assert_eq!(
            projected_fingerprints(&spn_reach.states, &keep),
            cpn_reach.fingerprints_over(&keep),
        );
    }
}
