//! Step 1: bring mutable domain facts inside the net.
//!
//! Each (subject, predicate) group of a declared mutable predicate becomes
//! a generated mirror container holding the object terms as tokens, with a
//! paired add/remove edit transition so external edits are net transitions.
//! Rules reading the predicate through plain patterns are rewritten to read
//! the mirror containment instead; reads the rewrite cannot cover (path
//! steps, variable predicates) are rejected. The original triples stay in
//! the graph as the frozen record of admissible values, read only by the
//! generated edit transitions.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{vocab, SpnModel};
use crate::rdf::{vocab as ns, Graph, PrefixMap, Term, Triple};
use crate::sparql::{parse_sparql, PatternTerm, Predicate, Query, TriplePattern};
use crate::unfold::UnfoldError;

/// The declared set of externally-editable predicates. Triples whose
/// predicate is not listed are frozen facts.
#[derive(Debug, Clone, Default)]
pub struct MutableDeclaration {
    pub predicates: BTreeSet<Term>,
}

impl MutableDeclaration {
    pub fn empty() -> Self {
        MutableDeclaration::default()
    }

    pub fn of(predicates: impl IntoIterator<Item = Term>) -> Self {
        MutableDeclaration {
            predicates: predicates.into_iter().collect(),
        }
    }

    /// Line format: `mutable <iri>` or `mutable prefix:local`, with `#`
    /// comments and blank lines ignored.
    pub fn parse(text: &str, prefixes: &PrefixMap) -> Result<Self, UnfoldError> {
        let mut predicates = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| UnfoldError::Declaration {
                line: i + 1,
                message,
            };
            let Some(rest) = line.strip_prefix("mutable") else {
                return Err(err(format!("expected 'mutable <predicate>', got '{line}'")));
            };
            let spec = rest.trim();
            let iri = if let Some(stripped) = spec.strip_prefix('<') {
                let Some(inner) = stripped.strip_suffix('>') else {
                    return Err(err("unterminated IRI".to_string()));
                };
                inner.to_string()
            } else if let Some((short, local)) = spec.split_once(':') {
                prefixes
                    .expand(short, local)
                    .ok_or_else(|| err(format!("unknown prefix '{short}:'")))?
            } else {
                return Err(err(format!("'{spec}' is not an IRI or prefixed name")));
            };
            predicates.insert(Term::iri(iri));
        }
        Ok(MutableDeclaration { predicates })
    }
}

/// Applies step 1. With an empty declaration the model is returned
/// unchanged.
pub fn internalize_domain(
    model: &SpnModel,
    declaration: &MutableDeclaration,
) -> Result<SpnModel, UnfoldError> {
    if declaration.predicates.is_empty() {
        return Ok(model.clone());
    }

    let mut graph = model.graph.clone();
    rewrite_rules(&mut graph, declaration)?;

    // One mirror container per (subject, predicate) group, in canonical
    // order so generated IRIs are stable.
    let mut groups: BTreeMap<(Term, Term), BTreeSet<Term>> = BTreeMap::new();
    for pred in &declaration.predicates {
        for t in model.graph.matching(None, Some(pred), None) {
            groups
                .entry((t.subject.clone(), pred.clone()))
                .or_default()
                .insert(t.object.clone());
        }
    }

    let contains = vocab::ldp_contains();
    let rdf_type = vocab::rdf_type();
    for (i, ((subject, pred), objects)) in groups.iter().enumerate() {
        if subject.is_blank() {
            return Err(UnfoldError::NonInternalizable {
                rule: subject.clone(),
                predicate: pred.clone(),
                reason: "blank-node subjects cannot seed edit expressions".to_string(),
            });
        }
        let mirror = gen(format!("mirror_{i}"));
        graph.insert(Triple::new(mirror.clone(), rdf_type.clone(), vocab::place()));
        graph.insert(Triple::new(
            mirror.clone(),
            gen("mirrorsSubject".to_string()),
            subject.clone(),
        ));
        graph.insert(Triple::new(
            mirror.clone(),
            gen("mirrorsPredicate".to_string()),
            pred.clone(),
        ));
        for o in objects {
            graph.insert(Triple::new(mirror.clone(), contains.clone(), o.clone()));
        }

        // Paired edit transitions: remove consumes a token; add re-creates
        // one of the originally recorded values (absent ones only, by set
        // semantics).
        let remove = gen(format!("edit_remove_{i}"));
        graph.insert(Triple::new(remove.clone(), rdf_type.clone(), vocab::transition()));
        graph.insert(Triple::new(
            remove.clone(),
            vocab::has_arg(),
            Term::literal("?X"),
        ));
        let remove_in = gen(format!("edit_remove_{i}_in"));
        graph.insert(Triple::new(remove_in.clone(), rdf_type.clone(), vocab::arc_p2t()));
        graph.insert(Triple::new(remove_in.clone(), vocab::rel_place(), mirror.clone()));
        graph.insert(Triple::new(
            remove_in.clone(),
            vocab::rel_transition(),
            remove.clone(),
        ));
        graph.insert(Triple::new(
            remove_in.clone(),
            vocab::has_arg(),
            Term::literal("?X"),
        ));

        let add = gen(format!("edit_add_{i}"));
        graph.insert(Triple::new(add.clone(), rdf_type.clone(), vocab::transition()));
        graph.insert(Triple::new(add.clone(), vocab::has_arg(), Term::literal("?X")));
        let add_out = gen(format!("edit_add_{i}_out"));
        graph.insert(Triple::new(add_out.clone(), rdf_type.clone(), vocab::arc_t2p()));
        graph.insert(Triple::new(add_out.clone(), vocab::rel_place(), mirror.clone()));
        graph.insert(Triple::new(
            add_out.clone(),
            vocab::rel_transition(),
            add.clone(),
        ));
        graph.insert(Triple::new(
            add_out.clone(),
            vocab::has_arg(),
            Term::literal("?X"),
        ));
        let expr = gen(format!("edit_add_{i}_expr"));
        graph.insert(Triple::new(expr.clone(), rdf_type.clone(), vocab::sparql_rule()));
        graph.insert(Triple::new(
            expr.clone(),
            vocab::has_sparql(),
            Term::literal(format!(
                "SELECT ?X WHERE {{ {subject} {pred} ?X . }}"
            )),
        ));
        graph.insert(Triple::new(add_out, vocab::arc_expr(), expr));
    }

    Ok(crate::model::load_model(graph)?)
}

fn gen(local: String) -> Term {
    Term::iri(format!("{}{local}", ns::SPNX_NS))
}

/// Rewrites every SPARQL rule text in the graph so that mutable-predicate
/// patterns read the mirror containment encoding instead.
fn rewrite_rules(graph: &mut Graph, declaration: &MutableDeclaration) -> Result<(), UnfoldError> {
    let has_sparql = vocab::has_sparql();
    let rule_nodes: Vec<(Term, Term)> = graph
        .matching(None, Some(&has_sparql), None)
        .map(|t| (t.subject.clone(), t.object.clone()))
        .collect();
    for (node, text_term) in rule_nodes {
        let Some(lit) = text_term.as_literal() else {
            continue;
        };
        // Loadable models have parseable rule text; skip anything else and
        // let load_model report it.
        let Ok(query) = parse_sparql(&lit.value, graph.prefixes()) else {
            continue;
        };
        if let Some(rewritten) = rewrite_query(&query, declaration, &node)? {
            graph.remove(&Triple::new(node.clone(), has_sparql.clone(), text_term));
            graph.insert(Triple::new(
                node,
                has_sparql.clone(),
                Term::literal(rewritten.to_string()),
            ));
        }
    }
    Ok(())
}

/// `None` when the query does not touch any mutable predicate. Plain
/// patterns `S p O` become the three-pattern mirror read; anything the
/// rewrite cannot express is an error.
fn rewrite_query(
    query: &Query,
    declaration: &MutableDeclaration,
    rule_node: &Term,
) -> Result<Option<Query>, UnfoldError> {
    let mutable = &declaration.predicates;
    let used_vars = query.pattern.pattern_variables();
    let mut fresh = 0usize;
    let mut next_var = || {
        loop {
            let name = format!("__mirror{fresh}");
            fresh += 1;
            if !used_vars.contains(&name) {
                return name;
            }
        }
    };

    let mut changed = false;
    let mut patterns: Vec<TriplePattern> = Vec::new();
    for p in &query.pattern.patterns {
        match &p.predicate {
            Predicate::Single(PatternTerm::Term(pred)) if mutable.contains(pred) => {
                changed = true;
                let var = next_var();
                let mirror = || PatternTerm::Var(var.clone());
                patterns.push(TriplePattern {
                    subject: mirror(),
                    predicate: Predicate::Single(PatternTerm::Term(gen(
                        "mirrorsSubject".to_string(),
                    ))),
                    object: p.subject.clone(),
                });
                patterns.push(TriplePattern {
                    subject: mirror(),
                    predicate: Predicate::Single(PatternTerm::Term(gen(
                        "mirrorsPredicate".to_string(),
                    ))),
                    object: PatternTerm::Term(pred.clone()),
                });
                patterns.push(TriplePattern {
                    subject: mirror(),
                    predicate: Predicate::Single(PatternTerm::Term(vocab::ldp_contains())),
                    object: p.object.clone(),
                });
            }
            Predicate::Single(PatternTerm::Var(_)) => {
                return Err(UnfoldError::NonInternalizable {
                    rule: rule_node.clone(),
                    predicate: mutable.iter().next().expect("non-empty").clone(),
                    reason: "a variable predicate may read any mutable predicate".to_string(),
                });
            }
            Predicate::Path(steps) => {
                if let Some(step) = steps.iter().find(|s| mutable.contains(*s)) {
                    return Err(UnfoldError::NonInternalizable {
                        rule: rule_node.clone(),
                        predicate: step.clone(),
                        reason: "mutable predicate inside a sequence path cannot be rewritten"
                            .to_string(),
                    });
                }
                patterns.push(p.clone());
            }
            _ => patterns.push(p.clone()),
        }
    }
    if !changed {
        return Ok(None);
    }
    Ok(Some(Query {
        form: query.form.clone(),
        pattern: crate::sparql::GraphPattern {
            patterns,
            filters: query.pattern.filters.clone(),
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_model;
    use crate::rdf::parse_turtle;

    fn model(doc: &str) -> SpnModel {
        load_model(parse_turtle(doc, None).unwrap()).unwrap()
    }

    #[test]
    fn empty_declaration_returns_model_unchanged() {
        let m = model("proj:p a spn:Place; ldp:contains proj:x.");
        let out = internalize_domain(&m, &MutableDeclaration::empty()).unwrap();
        assert!(out.graph.same_triples(&m.graph));
    }

    #[test]
    fn mutable_predicate_grows_mirror_place_and_edit_pair() {
        let doc = r#"
proj:room ifc4:hasSensor proj:s1, proj:s2.
proj:p a spn:Place.
"#;
        let m = model(doc);
        let decl = MutableDeclaration::of([Term::iri("http://example.org/ifc4#hasSensor")]);
        let out = internalize_domain(&m, &decl).unwrap();
        // One generated mirror place holding both objects.
        assert_eq!(out.places.len(), 2);
        let mirror = out
            .places
            .keys()
            .find(|p| p.to_string().contains("mirror_"))
            .unwrap()
            .clone();
        assert_eq!(out.tokens_of(&mirror).len(), 2);
        // Paired edit transitions with their arcs.
        assert_eq!(out.transitions.len(), 2);
        assert_eq!(out.arcs.len(), 2);
    }

    #[test]
    fn plain_pattern_reads_are_rewritten_to_the_mirror() {
        let doc = r#"
proj:room ifc4:hasSensor proj:s1.
proj:src a spn:Place; ldp:contains proj:tok.
proj:dst a spn:Place.
proj:t a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:g.
proj:g a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:room ifc4:hasSensor proj:s1 }".
proj:in a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:t; spn:hasArg "?X".
proj:out a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:t; spn:hasArg "?X".
"#;
        let m = model(doc);
        let decl = MutableDeclaration::of([Term::iri("http://example.org/ifc4#hasSensor")]);
        let out = internalize_domain(&m, &decl).unwrap();
        let guard_text = out
            .graph
            .object(
                &Term::iri("http://example.org/proj#g"),
                &vocab::has_sparql(),
            )
            .unwrap()
            .as_literal()
            .unwrap()
            .value
            .clone();
        assert!(guard_text.contains("mirrorsSubject"), "{guard_text}");
        assert!(guard_text.contains("ldp#contains"), "{guard_text}");
        assert!(!guard_text.contains("hasSensor ?"), "{guard_text}");
        // The rewritten guard still holds on the mirrored state.
        let rt_model = out.clone();
        let mut runtime = crate::runtime::Runtime::new(
            rt_model,
            crate::runtime::EngineConfig::default(),
        );
        let bindings = runtime
            .enumerate_bindings(&Term::iri("http://example.org/proj#t"))
            .unwrap();
        assert!(runtime.is_enabled(&bindings[0]).unwrap());
    }

    #[test]
    fn mutable_predicate_in_path_is_not_internalizable() {
        let doc = r#"
proj:room ifc4:hasSensor proj:s1.
proj:src a spn:Place; ldp:contains proj:tok.
proj:t a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:g.
proj:g a spn:SPARQLRule; spn:hasSPARQL "ASK { ?r ifc4:hasSensor/ifc4:reading ?v }".
proj:in a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:t; spn:hasArg "?X".
"#;
        let m = model(doc);
        let decl = MutableDeclaration::of([Term::iri("http://example.org/ifc4#hasSensor")]);
        let err = internalize_domain(&m, &decl).unwrap_err();
        assert!(matches!(err, UnfoldError::NonInternalizable { .. }), "{err}");
    }

    #[test]
    fn declaration_parses_both_iri_forms() {
        let text = "# comment\nmutable <http://e/p>\nmutable ifc4:hasSensor\n";
        let decl = MutableDeclaration::parse(text, &PrefixMap::bundled()).unwrap();
        assert_eq!(decl.predicates.len(), 2);
        assert!(decl
            .predicates
            .contains(&Term::iri("http://example.org/ifc4#hasSensor")));
    }

    #[test]
    fn bad_declaration_line_is_reported_with_number() {
        let err = MutableDeclaration::parse("mutable <http://e/p>\nfrozen x\n", &PrefixMap::bundled())
            .unwrap_err();
        match err {
            UnfoldError::Declaration { line, .. } => assert_eq!(line, 2),
            other => panic!("expected declaration error, got {other}"),
        }
    }

    #[test]
    fn edit_transitions_toggle_mirror_contents_in_exploration() {
        let doc = "proj:room ifc4:hasSensor proj:s1, proj:s2.";
        let m = model(doc);
        let decl = MutableDeclaration::of([Term::iri("http://example.org/ifc4#hasSensor")]);
        let out = internalize_domain(&m, &decl).unwrap();
        let reach = crate::runtime::explore_spn(&out, false, 100).unwrap();
        // Mirror contents range over all subsets of {s1, s2}.
        assert_eq!(reach.markings.len(), 4);
    }
}
