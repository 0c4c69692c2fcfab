//! Step 2: split latent semantic connections into explicit arcs.
//!
//! For every transition, the containment pairs its rules can touch are
//! enumerated against the colorset-saturated graph; each remote place found
//! this way (not already arc-connected) gets a fetch/return arc pair. The
//! generated arcs are flagged `spnx:readArc`, carry no tokens at firing
//! time, and leave remote place contents invariant, so runtime behavior is
//! unchanged; tabulation uses them as the declared read scope.

use std::collections::BTreeSet;

use crate::model::{vocab, SpnModel};
use crate::rdf::{vocab as ns, Term, Triple};
use crate::sparql::Solution;
use crate::unfold::{colorsets, owner_binding, saturate, touchable_atoms, transition_leaves,
    UnfoldError, MAX_DISCOVERY_ATOMS};

pub fn explicate_connections(model: &SpnModel) -> Result<SpnModel, UnfoldError> {
    let colors = colorsets(model)?;
    let saturated = saturate(model, &colors);

    let mut extra: Vec<Triple> = Vec::new();
    let mut counter = 0usize;
    for t in model.transitions.values() {
        let mut atoms = BTreeSet::new();
        for (owner, leaf) in transition_leaves(model, t) {
            let pre = owner_binding(&Solution::new(), &owner);
            atoms.extend(touchable_atoms(
                model,
                &saturated,
                &leaf.query,
                &pre,
                &t.iri,
                MAX_DISCOVERY_ATOMS,
            )?);
        }
        let connected: BTreeSet<&Term> = model
            .arcs
            .values()
            .filter(|a| a.transition == t.iri)
            .map(|a| &a.place)
            .collect();
        let remote: BTreeSet<&Term> = atoms
            .iter()
            .map(|(place, _)| place)
            .filter(|place| !connected.contains(*place))
            .collect();

        let arg = t
            .args
            .first()
            .expect("validated: transitions have at least one arg")
            .name
            .clone();
        for place in remote {
            for (local, class) in [("fetch", vocab::arc_p2t()), ("return", vocab::arc_t2p())] {
                let arc = Term::iri(format!("{}read_{counter}_{local}", ns::SPNX_NS));
                extra.push(Triple::new(arc.clone(), vocab::rdf_type(), class));
                extra.push(Triple::new(arc.clone(), vocab::rel_place(), (*place).clone()));
                extra.push(Triple::new(
                    arc.clone(),
                    vocab::rel_transition(),
                    t.iri.clone(),
                ));
                extra.push(Triple::new(
                    arc.clone(),
                    vocab::has_arg(),
                    Term::literal(arg.clone()),
                ));
                extra.push(Triple::new(arc, vocab::read_arc(), Term::boolean(true)));
            }
            counter += 1;
        }
    }

    if extra.is_empty() {
        return Ok(model.clone());
    }
    let mut graph = model.graph.clone();
    graph.extend(extra);
    Ok(crate::model::load_model(graph)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_model;
    use crate::rdf::parse_turtle;
    use crate::runtime::{render_event_log, EngineConfig, Runtime};

    fn model(doc: &str) -> SpnModel {
        load_model(parse_turtle(doc, None).unwrap()).unwrap()
    }

    const REMOTE_GUARD_MODEL: &str = r#"
proj:src a spn:Place; ldp:contains proj:tok.
proj:dst a spn:Place.
proj:lock a spn:Place; ldp:contains proj:key.
proj:t a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:g.
proj:g a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:lock ldp:contains proj:key }".
proj:in a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:t; spn:hasArg "?X".
proj:out a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:t; spn:hasArg "?X".
"#;

    #[test]
    fn remote_guard_reference_gets_one_fetch_return_pair() {
        let m = model(REMOTE_GUARD_MODEL);
        let out = explicate_connections(&m).unwrap();
        let read_arcs: Vec<_> = out.arcs.values().filter(|a| a.read_only).collect();
        assert_eq!(read_arcs.len(), 2);
        let lock = Term::iri("http://example.org/proj#lock");
        assert!(read_arcs.iter().all(|a| a.place == lock));
        let dirs: BTreeSet<_> = read_arcs.iter().map(|a| a.direction).collect();
        assert_eq!(dirs.len(), 2);
    }

    #[test]
    fn guard_without_remote_references_changes_nothing() {
        let doc = r#"
proj:src a spn:Place; ldp:contains proj:tok.
proj:dst a spn:Place.
proj:t a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:g.
proj:g a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:src ldp:contains ?X }".
proj:in a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:t; spn:hasArg "?X".
proj:out a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:t; spn:hasArg "?X".
"#;
        let m = model(doc);
        let out = explicate_connections(&m).unwrap();
        assert!(out.graph.same_triples(&m.graph));
    }

    #[test]
    fn explication_is_idempotent() {
        let m = model(REMOTE_GUARD_MODEL);
        let once = explicate_connections(&m).unwrap();
        let twice = explicate_connections(&once).unwrap();
        assert!(once.graph.same_triples(&twice.graph));
    }

    #[test]
    fn runtime_behavior_is_unchanged_by_read_arcs() {
        let run = |m: SpnModel| {
            let mut rt = Runtime::new(m, EngineConfig::default());
            rt.run().unwrap();
            render_event_log(rt.events())
        };
        let m = model(REMOTE_GUARD_MODEL);
        let explicated = explicate_connections(&m).unwrap();
        assert_eq!(run(m), run(explicated));
    }

    #[test]
    fn remote_place_contents_invariant_across_firings() {
        let m = model(REMOTE_GUARD_MODEL);
        let out = explicate_connections(&m).unwrap();
        let lock = Term::iri("http://example.org/proj#lock");
        let mut rt = Runtime::new(out, EngineConfig::default());
        let before = rt.model().tokens_of(&lock);
        rt.run().unwrap();
        assert_eq!(rt.model().tokens_of(&lock), before);
        assert!(rt.stats().firings > 0);
    }
}
