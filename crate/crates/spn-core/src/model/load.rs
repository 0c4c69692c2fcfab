//! Model extraction: from a graph of net triples to a validated in-memory
//! structure. Every cardinality and cross-reference is checked here, and
//! rule trees (including their SPARQL leaves) parse eagerly so malformed
//! rules fail at load time, not at fire time.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::error::{LoadError, ValidationError};
use crate::model::rule::{rdf_to_rule, Rule, RuleKind};
use crate::model::vocab;
use crate::rdf::{Graph, Term};
use crate::sparql::QueryForm;

/// A declared transition/arc argument. `name` keeps the leading `?` as
/// written in model files.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ArgDef {
    pub name: String,
    pub allowed_types: BTreeSet<Term>,
}

impl ArgDef {
    pub fn named(name: impl Into<String>) -> Self {
        ArgDef {
            name: name.into(),
            allowed_types: BTreeSet::new(),
        }
    }

    /// The variable name without the leading `?`, as bound during query
    /// evaluation.
    pub fn bare_name(&self) -> &str {
        self.name.strip_prefix('?').unwrap_or(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceDef {
    pub iri: Term,
    pub color_rule: Option<Rule>,
    pub init_rule: Option<Rule>,
    pub annotations: BTreeMap<Term, Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionDef {
    pub iri: Term,
    /// Absent guard means the transition is always enabled.
    pub guard: Option<Rule>,
    /// Sorted by argument name.
    pub args: Vec<ArgDef>,
    pub annotations: BTreeMap<Term, Term>,
}

impl TransitionDef {
    pub fn arg(&self, name: &str) -> Option<&ArgDef> {
        self.args.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ArcDirection {
    PlaceToTransition,
    TransitionToPlace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcDef {
    pub iri: Term,
    pub direction: ArcDirection,
    pub place: Term,
    pub transition: Term,
    pub args: Vec<ArgDef>,
    pub expr: Option<Rule>,
    /// Generated fetch/return arcs carry no tokens at firing time; they
    /// only record which remote places a rule reads.
    pub read_only: bool,
}

/// A validated net: places, transitions, arcs and the graph they came
/// from. Immutable after load except for `ldp:contains` triples and
/// runtime bookkeeping in the reserved namespace.
#[derive(Debug, Clone)]
pub struct SpnModel {
    pub places: BTreeMap<Term, PlaceDef>,
    pub transitions: BTreeMap<Term, TransitionDef>,
    pub arcs: BTreeMap<Term, ArcDef>,
    pub graph: Graph,
}

impl SpnModel {
    /// The vocabulary: every term occurring in the graph.
    pub fn vocabulary(&self) -> BTreeSet<Term> {
        self.graph.vocabulary()
    }

    /// Place-to-transition arcs of a transition, in arc-IRI order.
    pub fn input_arcs<'a>(&'a self, transition: &'a Term) -> impl Iterator<Item = &'a ArcDef> {
        self.arcs.values().filter(move |a| {
            a.direction == ArcDirection::PlaceToTransition && &a.transition == transition
        })
    }

    /// Transition-to-place arcs of a transition, in arc-IRI order.
    pub fn output_arcs<'a>(&'a self, transition: &'a Term) -> impl Iterator<Item = &'a ArcDef> {
        self.arcs.values().filter(move |a| {
            a.direction == ArcDirection::TransitionToPlace && &a.transition == transition
        })
    }

    /// Tokens currently contained in a place, straight from the graph.
    pub fn tokens_of(&self, place: &Term) -> BTreeSet<Term> {
        self.graph
            .objects(place, &vocab::ldp_contains())
            .cloned()
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty() && self.transitions.is_empty() && self.arcs.is_empty()
    }
}

/// Loads and validates a model; all violations are collected and reported
/// together.
pub fn load_model(graph: Graph) -> Result<SpnModel, LoadError> {
    let mut errors: Vec<ValidationError> = Vec::new();
    // Shared across every rule root: rejects rule nodes reachable from two
    // parents as well as cycles.
    let mut seen_rules: BTreeSet<Term> = BTreeSet::new();

    let mut places = BTreeMap::new();
    for iri in graph.subjects_of_type(&vocab::place()).cloned().collect::<Vec<_>>() {
        let color_rule = load_rule_slot(
            &graph,
            &iri,
            &vocab::color_rule(),
            "spn:colorRule",
            RuleKind::Boolean,
            &mut seen_rules,
            &mut errors,
        );
        let init_rule = load_rule_slot(
            &graph,
            &iri,
            &vocab::init_rule(),
            "spn:initRule",
            RuleKind::TokenSet,
            &mut seen_rules,
            &mut errors,
        );
        let annotations = collect_annotations(&graph, &iri);
        places.insert(
            iri.clone(),
            PlaceDef {
                iri,
                color_rule,
                init_rule,
                annotations,
            },
        );
    }

    let mut transitions = BTreeMap::new();
    for iri in graph
        .subjects_of_type(&vocab::transition())
        .cloned()
        .collect::<Vec<_>>()
    {
        let guard = load_rule_slot(
            &graph,
            &iri,
            &vocab::guard_rule(),
            "spn:guardRule",
            RuleKind::Boolean,
            &mut seen_rules,
            &mut errors,
        );
        let args = load_args(&graph, &iri, &mut errors);
        if args.is_empty() {
            errors.push(ValidationError::new(
                iri.clone(),
                "transition needs at least 1 spn:hasArg (cardinality 1:?)",
            ));
        }
        let annotations = collect_annotations(&graph, &iri);
        transitions.insert(
            iri.clone(),
            TransitionDef {
                iri,
                guard,
                args,
                annotations,
            },
        );
    }

    // Arcs typed only as the abstract superclass have no direction.
    for iri in graph.subjects_of_type(&vocab::arc()) {
        let p2t = graph.contains(&triple(iri, &vocab::rdf_type(), &vocab::arc_p2t()));
        let t2p = graph.contains(&triple(iri, &vocab::rdf_type(), &vocab::arc_t2p()));
        if !p2t && !t2p {
            errors.push(ValidationError::new(
                iri.clone(),
                "arc must be typed spn:ArcP2T or spn:ArcT2P",
            ));
        }
    }

    let mut arcs = BTreeMap::new();
    for (class, direction) in [
        (vocab::arc_p2t(), ArcDirection::PlaceToTransition),
        (vocab::arc_t2p(), ArcDirection::TransitionToPlace),
    ] {
        for iri in graph.subjects_of_type(&class).cloned().collect::<Vec<_>>() {
            if let Some(arc) = load_arc(
                &graph,
                &iri,
                direction,
                &places,
                &transitions,
                &mut seen_rules,
                &mut errors,
            ) {
                arcs.insert(iri, arc);
            }
        }
    }

    // Arc args must be a subset of the related transition's args, and every
    // transition arg needs a candidate source.
    for arc in arcs.values() {
        if let Some(t) = transitions.get(&arc.transition) {
            for arg in &arc.args {
                if t.arg(&arg.name).is_none() {
                    errors.push(ValidationError::new(
                        arc.iri.clone(),
                        format!(
                            "arc arg {} is not among the args of transition {}",
                            arg.name, arc.transition
                        ),
                    ));
                }
            }
        }
    }
    for t in transitions.values() {
        for arg in &t.args {
            let from_input = arcs.values().any(|a| {
                a.direction == ArcDirection::PlaceToTransition
                    && !a.read_only
                    && a.transition == t.iri
                    && a.args.iter().any(|x| x.name == arg.name)
            });
            let from_output_select = arcs.values().any(|a| {
                a.direction == ArcDirection::TransitionToPlace
                    && a.transition == t.iri
                    && a.args.iter().any(|x| x.name == arg.name)
                    && selects_var(a.expr.as_ref(), arg.bare_name())
            });
            if !from_input && !from_output_select {
                errors.push(ValidationError::new(
                    t.iri.clone(),
                    format!(
                        "arg {} has no binding source: no place-to-transition arc carries it \
                         and no transition-to-place arc expression selects it",
                        arg.name
                    ),
                ));
            }
        }
    }

    if errors.is_empty() {
        Ok(SpnModel {
            places,
            transitions,
            arcs,
            graph,
        })
    } else {
        Err(LoadError { errors })
    }
}

fn triple(s: &Term, p: &Term, o: &Term) -> crate::rdf::Triple {
    crate::rdf::Triple::new(s.clone(), p.clone(), o.clone())
}

/// True when the rule is a SELECT projecting `bare` (candidate source for a
/// generated argument).
fn selects_var(rule: Option<&Rule>, bare: &str) -> bool {
    match rule {
        Some(Rule::Sparql(leaf)) => match &leaf.query.form {
            QueryForm::Select { vars, .. } => vars.iter().any(|v| v == bare),
            QueryForm::Ask => false,
        },
        _ => false,
    }
}

fn load_rule_slot(
    g: &Graph,
    node: &Term,
    pred: &Term,
    pred_name: &str,
    expected: RuleKind,
    seen: &mut BTreeSet<Term>,
    errors: &mut Vec<ValidationError>,
) -> Option<Rule> {
    let roots: Vec<Term> = g.objects(node, pred).cloned().collect();
    if roots.len() > 1 {
        errors.push(ValidationError::new(
            node.clone(),
            format!(
                "{pred_name} given {} times (cardinality 0:1)",
                roots.len()
            ),
        ));
        return None;
    }
    let root = roots.into_iter().next()?;
    match rdf_to_rule(g, &root, seen) {
        Ok(rule) => match rule.static_kind() {
            Ok(kind) if kind == expected => Some(rule),
            Ok(kind) => {
                errors.push(ValidationError::new(
                    node.clone(),
                    format!("{pred_name} must produce a {expected}, but produces a {kind}"),
                ));
                None
            }
            Err(msg) => {
                errors.push(ValidationError::new(root, msg));
                None
            }
        },
        Err(e) => {
            errors.push(e);
            None
        }
    }
}

/// `spn:hasArg` accepts both ArgDef nodes and bare string literals like
/// `"?TOKEN"`; literals become ArgDefs with no type restriction.
fn load_args(g: &Graph, node: &Term, errors: &mut Vec<ValidationError>) -> Vec<ArgDef> {
    let mut args: Vec<ArgDef> = Vec::new();
    for value in g.objects(node, &vocab::has_arg()) {
        let parsed = match value {
            Term::Literal(l) => validate_arg_name(&l.value).map(|_| ArgDef::named(&l.value)),
            Term::Iri(_) | Term::Blank(_) => load_arg_node(g, value),
        };
        match parsed {
            Ok(arg) => {
                if args.iter().any(|a| a.name == arg.name) {
                    errors.push(ValidationError::new(
                        node.clone(),
                        format!("duplicate arg {}", arg.name),
                    ));
                } else {
                    args.push(arg);
                }
            }
            Err(msg) => errors.push(ValidationError::new(node.clone(), msg)),
        }
    }
    args.sort();
    args
}

fn load_arg_node(g: &Graph, node: &Term) -> Result<ArgDef, String> {
    let names: Vec<&Term> = g.objects(node, &vocab::arg_name()).collect();
    let [name] = names.as_slice() else {
        return Err(format!(
            "arg node {node} needs exactly 1 spn:argName, found {} (cardinality 1:1)",
            names.len()
        ));
    };
    let Some(lit) = name.as_literal() else {
        return Err(format!("spn:argName of {node} must be a string literal"));
    };
    validate_arg_name(&lit.value)?;
    let mut allowed_types = BTreeSet::new();
    for ty in g.objects(node, &vocab::arg_type()) {
        if ty.is_iri() {
            allowed_types.insert(ty.clone());
        } else {
            return Err(format!("spn:argType of {node} must be a class IRI"));
        }
    }
    Ok(ArgDef {
        name: lit.value.clone(),
        allowed_types,
    })
}

fn validate_arg_name(name: &str) -> Result<(), String> {
    let Some(rest) = name.strip_prefix('?') else {
        return Err(format!("arg name '{name}' must start with '?'"));
    };
    let valid = !rest.is_empty()
        && rest
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && rest.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if valid {
        Ok(())
    } else {
        Err(format!("arg name '{name}' is not a valid variable name"))
    }
}

fn load_arc(
    g: &Graph,
    iri: &Term,
    direction: ArcDirection,
    places: &BTreeMap<Term, PlaceDef>,
    transitions: &BTreeMap<Term, TransitionDef>,
    seen: &mut BTreeSet<Term>,
    errors: &mut Vec<ValidationError>,
) -> Option<ArcDef> {
    let before = errors.len();

    let place = expect_one(g, iri, &vocab::rel_place(), "spn:relPlace", errors);
    if let Some(p) = &place {
        if !places.contains_key(p) {
            errors.push(ValidationError::new(
                iri.clone(),
                format!("spn:relPlace {p} is not a declared spn:Place"),
            ));
        }
    }
    let transition = expect_one(g, iri, &vocab::rel_transition(), "spn:relTransition", errors);
    if let Some(t) = &transition {
        if !transitions.contains_key(t) {
            errors.push(ValidationError::new(
                iri.clone(),
                format!("spn:relTransition {t} is not a declared spn:Transition"),
            ));
        }
    }

    let args = load_args(g, iri, errors);
    if args.is_empty() {
        errors.push(ValidationError::new(
            iri.clone(),
            "arc needs at least 1 spn:hasArg (cardinality 1:?)",
        ));
    }

    let expr = load_rule_slot(
        g,
        iri,
        &vocab::arc_expr(),
        "spn:arcExpr",
        RuleKind::TokenSet,
        seen,
        errors,
    );
    if expr.is_none()
        && args.len() > 1
        && g.objects(iri, &vocab::arc_expr()).next().is_none()
    {
        errors.push(ValidationError::new(
            iri.clone(),
            format!("arc has {} args but no spn:arcExpr", args.len()),
        ));
    }

    let read_only = g
        .object(iri, &vocab::read_arc())
        .and_then(Term::as_bool)
        .unwrap_or(false);

    if errors.len() > before {
        return None;
    }
    Some(ArcDef {
        iri: iri.clone(),
        direction,
        place: place?,
        transition: transition?,
        args,
        expr,
        read_only,
    })
}

fn expect_one(
    g: &Graph,
    node: &Term,
    pred: &Term,
    pred_name: &str,
    errors: &mut Vec<ValidationError>,
) -> Option<Term> {
    let values: Vec<&Term> = g.objects(node, pred).collect();
    match values.as_slice() {
        [single] => Some((*single).clone()),
        other => {
            errors.push(ValidationError::new(
                node.clone(),
                format!(
                    "{pred_name} given {} times (cardinality 1:1)",
                    other.len()
                ),
            ));
            None
        }
    }
}

/// Non-structural properties of a node: scenario tags, engine-constraint
/// annotations and the like. Marking and bookkeeping stay out.
fn collect_annotations(g: &Graph, node: &Term) -> BTreeMap<Term, Term> {
    let structural: BTreeSet<Term> = [
        vocab::rdf_type(),
        vocab::guard_rule(),
        vocab::color_rule(),
        vocab::init_rule(),
        vocab::has_arg(),
        vocab::rel_place(),
        vocab::rel_transition(),
        vocab::arc_expr(),
        vocab::ldp_contains(),
        vocab::last_move_tick(),
    ]
    .into();
    let mut out = BTreeMap::new();
    for t in g.matching(Some(node), None, None) {
        if !structural.contains(&t.predicate) {
            out.entry(t.predicate.clone()).or_insert(t.object.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rule::LogicalOp;
    use crate::rdf::{parse_turtle, serialize_turtle};

    const MICRO_MODEL: &str = r#"
proj:start a spn:Place.
proj:done a spn:Place.

proj:advance a spn:Transition;
    spn:guardRule proj:rule_not;
    spn:hasArg "?TOKEN".

proj:rule_not a spn:CompoundRule;
    spn:operator "NOT";
    spn:subRule proj:rule_ask.

proj:rule_ask a spn:SPARQLRule;
    spn:hasSPARQL "ASK { proj:done ldp:contains ?TOKEN }".

proj:in a spn:ArcP2T;
    spn:relPlace proj:start;
    spn:relTransition proj:advance;
    spn:hasArg "?TOKEN".

proj:out a spn:ArcT2P;
    spn:relPlace proj:done;
    spn:relTransition proj:advance;
    spn:hasArg "?TOKEN".
"#;

    fn load(doc: &str) -> Result<SpnModel, LoadError> {
        load_model(parse_turtle(doc, None).unwrap())
    }

    #[test]
    fn micro_model_loads() {
        let model = load(MICRO_MODEL).unwrap();
        assert_eq!(model.places.len(), 2);
        assert_eq!(model.transitions.len(), 1);
        assert_eq!(model.arcs.len(), 2);
        let t = model.transitions.values().next().unwrap();
        match t.guard.as_ref().unwrap() {
            Rule::Compound { op, subs } => {
                assert_eq!(*op, LogicalOp::Not);
                assert!(matches!(subs[0], Rule::Sparql(_)));
            }
            other => panic!("expected compound guard, got {other:?}"),
        }
        assert_eq!(t.args[0].name, "?TOKEN");
        assert!(t.args[0].allowed_types.is_empty());
    }

    #[test]
    fn double_color_rule_is_cardinality_error() {
        let doc = r#"
proj:p a spn:Place; spn:colorRule proj:r1; spn:colorRule proj:r2.
proj:r1 a spn:ConstantRule; spn:hasValue "true"^^xsd:boolean.
proj:r2 a spn:ConstantRule; spn:hasValue "true"^^xsd:boolean.
"#;
        let err = load(doc).unwrap_err();
        assert!(err.to_string().contains("0:1"), "{err}");
    }

    #[test]
    fn arc_with_two_args_needs_expression() {
        let doc = r#"
proj:p a spn:Place.
proj:t a spn:Transition; spn:hasArg "?A"; spn:hasArg "?B".
proj:arc a spn:ArcP2T;
    spn:relPlace proj:p;
    spn:relTransition proj:t;
    spn:hasArg "?A"; spn:hasArg "?B".
proj:arc2 a spn:ArcP2T;
    spn:relPlace proj:p;
    spn:relTransition proj:t;
    spn:hasArg "?B".
"#;
        let err = load(doc).unwrap_err();
        assert!(
            err.errors
                .iter()
                .any(|e| e.message.contains("args but no spn:arcExpr")),
            "{err}"
        );
    }

    #[test]
    fn arc_arg_outside_transition_args_is_rejected() {
        let doc = r#"
proj:p a spn:Place.
proj:t a spn:Transition; spn:hasArg "?A".
proj:arc a spn:ArcP2T;
    spn:relPlace proj:p;
    spn:relTransition proj:t;
    spn:hasArg "?OTHER".
"#;
        let err = load(doc).unwrap_err();
        assert!(
            err.errors
                .iter()
                .any(|e| e.message.contains("not among the args")),
            "{err}"
        );
    }

    #[test]
    fn missing_rel_place_cites_cardinality() {
        let doc = r#"
proj:t a spn:Transition; spn:hasArg "?A".
proj:arc a spn:ArcP2T;
    spn:relTransition proj:t;
    spn:hasArg "?A".
"#;
        let err = load(doc).unwrap_err();
        assert!(
            err.errors
                .iter()
                .any(|e| e.message.contains("spn:relPlace") && e.message.contains("1:1")),
            "{err}"
        );
    }

    #[test]
    fn guard_must_be_boolean() {
        let doc = r#"
proj:p a spn:Place.
proj:t a spn:Transition; spn:guardRule proj:r; spn:hasArg "?A".
proj:r a spn:SPARQLRule; spn:hasSPARQL "SELECT ?x { ?x a spn:Place }".
proj:arc a spn:ArcP2T; spn:relPlace proj:p; spn:relTransition proj:t; spn:hasArg "?A".
"#;
        let err = load(doc).unwrap_err();
        assert!(
            err.errors.iter().any(|e| e.message.contains("boolean")),
            "{err}"
        );
    }

    #[test]
    fn arg_def_nodes_with_types() {
        let doc = r#"
proj:p a spn:Place.
proj:t a spn:Transition; spn:hasArg proj:argT.
proj:argT a spn:ArgDef; spn:argName "?TOKEN"; spn:argType ifc4:IfcWall.
proj:arc a spn:ArcP2T; spn:relPlace proj:p; spn:relTransition proj:t; spn:hasArg proj:argT.
"#;
        let model = load(doc).unwrap();
        let t = model.transitions.values().next().unwrap();
        assert_eq!(t.args[0].name, "?TOKEN");
        assert_eq!(t.args[0].allowed_types.len(), 1);
    }

    #[test]
    fn transition_arg_without_source_is_rejected() {
        let doc = r#"
proj:p a spn:Place.
proj:t a spn:Transition; spn:hasArg "?A"; spn:hasArg "?GHOST".
proj:arc a spn:ArcP2T; spn:relPlace proj:p; spn:relTransition proj:t; spn:hasArg "?A".
"#;
        let err = load(doc).unwrap_err();
        assert!(
            err.errors
                .iter()
                .any(|e| e.message.contains("no binding source")),
            "{err}"
        );
    }

    #[test]
    fn generated_arg_from_output_select_is_a_valid_source() {
        let doc = r#"
proj:p a spn:Place.
proj:t a spn:Transition; spn:hasArg "?NEW".
proj:out a spn:ArcT2P;
    spn:relPlace proj:p;
    spn:relTransition proj:t;
    spn:hasArg "?NEW";
    spn:arcExpr proj:sel.
proj:sel a spn:SPARQLRule; spn:hasSPARQL "SELECT ?NEW { ?NEW a ifc4:IfcWall }".
"#;
        assert!(load(doc).is_ok());
    }

    #[test]
    fn shared_rule_node_is_rejected() {
        let doc = r#"
proj:p a spn:Place.
proj:t1 a spn:Transition; spn:guardRule proj:shared; spn:hasArg "?A".
proj:t2 a spn:Transition; spn:guardRule proj:shared; spn:hasArg "?A".
proj:shared a spn:ConstantRule; spn:hasValue "true"^^xsd:boolean.
proj:a1 a spn:ArcP2T; spn:relPlace proj:p; spn:relTransition proj:t1; spn:hasArg "?A".
proj:a2 a spn:ArcP2T; spn:relPlace proj:p; spn:relTransition proj:t2; spn:hasArg "?A".
"#;
        let err = load(doc).unwrap_err();
        assert!(err.to_string().contains("tree"), "{err}");
    }

    #[test]
    fn load_serialize_load_is_identity() {
        let model = load(MICRO_MODEL).unwrap();
        let doc = serialize_turtle(&model.graph);
        let again = load_model(parse_turtle(&doc, None).unwrap()).unwrap();
        assert_eq!(model.places, again.places);
        assert_eq!(model.transitions, again.transitions);
        assert_eq!(model.arcs, again.arcs);
    }

    #[test]
    fn empty_graph_loads_as_empty_model() {
        let model = load("").unwrap();
        assert!(model.is_empty());
    }

    #[test]
    fn undirected_arc_is_rejected() {
        let doc = r#"
proj:p a spn:Place.
proj:t a spn:Transition; spn:hasArg "?A".
proj:arc a spn:Arc; spn:relPlace proj:p; spn:relTransition proj:t; spn:hasArg "?A".
"#;
        let err = load(doc).unwrap_err();
        assert!(
            err.errors
                .iter()
                .any(|e| e.message.contains("ArcP2T or spn:ArcT2P")),
            "{err}"
        );
    }
}
