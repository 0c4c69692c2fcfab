//! Shared test oracles, kept deliberately independent of the engine's
//! evaluation paths: the query oracle enumerates raw triples per pattern
//! with its own substitution, path expansion and comparison code; the net
//! oracle simulates sweeps over explicit token sets with Rust-closure
//! guards.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use spn_core::rdf::{vocab, Graph, Term, Triple};
use spn_core::sparql::{
    CmpOp, FilterExpr, GraphPattern, Operand, PatternTerm, Predicate, Query, QueryForm, Solution,
    TriplePattern,
};

// ---------------------------------------------------------------------------
// Brute-force query oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteResult {
    Boolean(bool),
    Solutions(Vec<Solution>),
}

/// Direct evaluation: for every triple pattern, try every triple in the
/// graph; keep assignments consistent across patterns; apply filters on the
/// complete assignment. No indexes, no join ordering, no early filtering.
pub fn brute_eval(
    query: &Query,
    graph: &Graph,
    pre_bound: &Solution,
) -> Result<BruteResult, String> {
    // Own path expansion with oracle-local variable names.
    let mut primitive: Vec<(PatternTerm, PatternTerm, PatternTerm)> = Vec::new();
    for (i, p) in query.pattern.patterns.iter().enumerate() {
        match &p.predicate {
            Predicate::Single(pred) => {
                primitive.push((p.subject.clone(), pred.clone(), p.object.clone()));
            }
            Predicate::Path(steps) => {
                let mut current = p.subject.clone();
                for (j, step) in steps.iter().enumerate() {
                    let next = if j + 1 == steps.len() {
                        p.object.clone()
                    } else {
                        PatternTerm::Var(format!("#oracle_{i}_{j}"))
                    };
                    primitive.push((
                        current.clone(),
                        PatternTerm::Term(step.clone()),
                        next.clone(),
                    ));
                    current = next;
                }
            }
        }
    }

    // Own pre-binding substitution.
    let sub = |pt: &PatternTerm| -> PatternTerm {
        match pt {
            PatternTerm::Var(v) => match pre_bound.get(v) {
                Some(t) => PatternTerm::Term(t.clone()),
                None => pt.clone(),
            },
            t => t.clone(),
        }
    };
    let primitive: Vec<_> = primitive
        .iter()
        .map(|(s, p, o)| (sub(s), sub(p), sub(o)))
        .collect();

    // Unbindable filter variables are an error, exactly when no pattern can
    // ever bind them.
    let mut pattern_vars: BTreeSet<String> = BTreeSet::new();
    for (s, p, o) in &primitive {
        for pt in [s, p, o] {
            if let PatternTerm::Var(v) = pt {
                pattern_vars.insert(v.clone());
            }
        }
    }
    let mut filter_vars = BTreeSet::new();
    for f in &query.pattern.filters {
        f.variables(&mut filter_vars);
    }
    for v in &filter_vars {
        if pre_bound.get(v).is_none() && !pattern_vars.contains(v) {
            return Err(format!("unbound filter variable ?{v}"));
        }
    }

    let triples: Vec<&Triple> = graph.iter().collect();
    let mut assignments: Vec<BTreeMap<String, Term>> = Vec::new();
    enumerate(&primitive, &triples, BTreeMap::new(), &mut assignments);

    let survivors: Vec<BTreeMap<String, Term>> = assignments
        .into_iter()
        .filter(|a| {
            query
                .pattern
                .filters
                .iter()
                .all(|f| oracle_filter(f, a, pre_bound))
        })
        .collect();

    match &query.form {
        QueryForm::Ask => Ok(BruteResult::Boolean(!survivors.is_empty())),
        QueryForm::Select { vars, .. } => {
            let mut out: BTreeSet<Solution> = BTreeSet::new();
            for a in survivors {
                let mut sol: Solution = pre_bound.clone();
                for v in vars {
                    if let Some(t) = a.get(v).cloned().or_else(|| pre_bound.get(v).cloned()) {
                        sol.set(v.clone(), t);
                    }
                }
                out.insert(sol);
            }
            Ok(BruteResult::Solutions(out.into_iter().collect()))
        }
    }
}

fn enumerate(
    patterns: &[(PatternTerm, PatternTerm, PatternTerm)],
    triples: &[&Triple],
    assignment: BTreeMap<String, Term>,
    out: &mut Vec<BTreeMap<String, Term>>,
) {
    let Some(((s, p, o), rest)) = patterns.split_first() else {
        out.push(assignment);
        return;
    };
    for t in triples {
        let mut next = assignment.clone();
        if unify(s, &t.subject, &mut next)
            && unify(p, &t.predicate, &mut next)
            && unify(o, &t.object, &mut next)
        {
            enumerate(rest, triples, next, out);
        }
    }
}

fn unify(pt: &PatternTerm, actual: &Term, assignment: &mut BTreeMap<String, Term>) -> bool {
    match pt {
        PatternTerm::Term(t) => t == actual,
        PatternTerm::Var(v) => match assignment.get(v) {
            Some(existing) => existing == actual,
            None => {
                assignment.insert(v.clone(), actual.clone());
                true
            }
        },
    }
}

fn oracle_filter(
    f: &FilterExpr,
    assignment: &BTreeMap<String, Term>,
    pre_bound: &Solution,
) -> bool {
    match f {
        FilterExpr::Compare(op, a, b) => {
            let term = |operand: &Operand| -> Option<Term> {
                match operand {
                    Operand::Const(t) => Some(t.clone()),
                    Operand::Var(v) => assignment
                        .get(v)
                        .cloned()
                        .or_else(|| pre_bound.get(v).cloned()),
                }
            };
            let (Some(left), Some(right)) = (term(a), term(b)) else {
                return false;
            };
            oracle_compare(*op, &left, &right)
        }
        FilterExpr::And(a, b) => {
            oracle_filter(a, assignment, pre_bound) && oracle_filter(b, assignment, pre_bound)
        }
        FilterExpr::Or(a, b) => {
            oracle_filter(a, assignment, pre_bound) || oracle_filter(b, assignment, pre_bound)
        }
        FilterExpr::Not(e) => !oracle_filter(e, assignment, pre_bound),
    }
}

/// Comparison re-derived from first principles: numeric literals compare
/// numerically, same-shape terms lexically, everything else is false.
fn oracle_compare(op: CmpOp, a: &Term, b: &Term) -> bool {
    use std::cmp::Ordering;
    fn numeric(t: &Term) -> Option<f64> {
        let lit = t.as_literal()?;
        let numeric_types = [
            vocab::XSD_INTEGER,
            vocab::XSD_DECIMAL,
            vocab::XSD_DOUBLE,
            vocab::XSD_FLOAT,
            vocab::XSD_INT,
            vocab::XSD_LONG,
            vocab::XSD_NON_NEGATIVE_INTEGER,
        ];
        if numeric_types.contains(&lit.datatype.as_deref()?) {
            lit.value.trim().parse().ok()
        } else {
            None
        }
    }
    let ord: Option<Ordering> = match (a, b) {
        (Term::Literal(la), Term::Literal(lb)) => match (numeric(a), numeric(b)) {
            (Some(x), Some(y)) => x.partial_cmp(&y),
            _ if la.datatype == lb.datatype && la.language == lb.language => {
                Some(la.value.cmp(&lb.value))
            }
            _ => None,
        },
        (Term::Iri(x), Term::Iri(y)) => Some(x.cmp(y)),
        (Term::Blank(x), Term::Blank(y)) => Some(x.cmp(y)),
        _ => None,
    };
    match (op, ord) {
        (_, None) => false,
        (CmpOp::Eq, Some(o)) => o == Ordering::Equal,
        (CmpOp::Ne, Some(o)) => o != Ordering::Equal,
        (CmpOp::Lt, Some(o)) => o == Ordering::Less,
        (CmpOp::Le, Some(o)) => o != Ordering::Greater,
        (CmpOp::Gt, Some(o)) => o == Ordering::Greater,
        (CmpOp::Ge, Some(o)) => o != Ordering::Less,
    }
}

// ---------------------------------------------------------------------------
// Random graphs and queries
// ---------------------------------------------------------------------------

pub fn term_pool() -> Vec<Term> {
    let mut pool = Vec::new();
    for i in 0..8 {
        pool.push(Term::iri(format!("http://t/n{i}")));
    }
    for i in 0..3 {
        pool.push(Term::blank(format!("b{i}")));
    }
    for s in ["a", "b", "c"] {
        pool.push(Term::literal(s));
    }
    for i in 0..4 {
        pool.push(Term::integer(i));
    }
    pool.push(Term::typed_literal("1.5", vocab::XSD_DECIMAL));
    pool.push(Term::boolean(true));
    pool
}

pub fn predicate_pool() -> Vec<Term> {
    (0..4).map(|i| Term::iri(format!("http://t/p{i}"))).collect()
}

pub fn random_graph(rng: &mut StdRng, max_triples: usize) -> Graph {
    let terms = term_pool();
    let preds = predicate_pool();
    let mut g = Graph::new();
    let n = rng.gen_range(0..=max_triples);
    for _ in 0..n {
        let subject = loop {
            let t = terms[rng.gen_range(0..terms.len())].clone();
            if !t.is_literal() {
                break t;
            }
        };
        let predicate = preds[rng.gen_range(0..preds.len())].clone();
        let object = terms[rng.gen_range(0..terms.len())].clone();
        g.insert(Triple::new(subject, predicate, object));
    }
    g
}

fn random_pattern_term(rng: &mut StdRng, vars: &[&str]) -> PatternTerm {
    if rng.gen_bool(0.55) {
        PatternTerm::Var(vars[rng.gen_range(0..vars.len())].to_string())
    } else {
        // Blank nodes are unreachable by name in query text; queries reach
        // them through variables.
        let terms: Vec<Term> = term_pool().into_iter().filter(|t| !t.is_blank()).collect();
        PatternTerm::Term(terms[rng.gen_range(0..terms.len())].clone())
    }
}

/// A random query within the supported subset: up to `max_patterns`
/// patterns (occasionally a two-step path), up to one filter over pattern
/// variables.
pub fn random_query(rng: &mut StdRng, max_patterns: usize) -> Query {
    let vars = ["x", "y", "z", "w"];
    let preds = predicate_pool();
    let n = rng.gen_range(1..=max_patterns);
    let mut patterns = Vec::new();
    for _ in 0..n {
        let subject = random_pattern_term(rng, &vars);
        let object = random_pattern_term(rng, &vars);
        let predicate = if rng.gen_bool(0.2) {
            Predicate::Path(vec![
                preds[rng.gen_range(0..preds.len())].clone(),
                preds[rng.gen_range(0..preds.len())].clone(),
            ])
        } else if rng.gen_bool(0.3) {
            Predicate::Single(PatternTerm::Var(
                vars[rng.gen_range(0..vars.len())].to_string(),
            ))
        } else {
            Predicate::Single(PatternTerm::Term(
                preds[rng.gen_range(0..preds.len())].clone(),
            ))
        };
        patterns.push(TriplePattern {
            subject,
            predicate,
            object,
        });
    }

    let mut pattern_vars: Vec<String> = Vec::new();
    for p in &patterns {
        for pt in [&p.subject, &p.object] {
            if let PatternTerm::Var(v) = pt {
                if !pattern_vars.contains(v) {
                    pattern_vars.push(v.clone());
                }
            }
        }
        if let Predicate::Single(PatternTerm::Var(v)) = &p.predicate {
            if !pattern_vars.contains(v) {
                pattern_vars.push(v.clone());
            }
        }
    }

    let filters = if !pattern_vars.is_empty() && rng.gen_bool(0.6) {
        let operand = |rng: &mut StdRng| -> Operand {
            if rng.gen_bool(0.6) {
                Operand::Var(pattern_vars[rng.gen_range(0..pattern_vars.len())].clone())
            } else {
                let terms: Vec<Term> =
                    term_pool().into_iter().filter(|t| !t.is_blank()).collect();
                Operand::Const(terms[rng.gen_range(0..terms.len())].clone())
            }
        };
        let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
        let cmp = |rng: &mut StdRng| {
            FilterExpr::Compare(ops[rng.gen_range(0..ops.len())], operand(rng), operand(rng))
        };
        let expr = match rng.gen_range(0..4) {
            0 => cmp(rng),
            1 => FilterExpr::And(Box::new(cmp(rng)), Box::new(cmp(rng))),
            2 => FilterExpr::Or(Box::new(cmp(rng)), Box::new(cmp(rng))),
            _ => FilterExpr::Not(Box::new(cmp(rng))),
        };
        vec![expr]
    } else {
        Vec::new()
    };

    let form = if rng.gen_bool(0.5) || pattern_vars.is_empty() {
        QueryForm::Ask
    } else {
        let mut projected: Vec<String> = pattern_vars.clone();
        projected.shuffle(rng);
        projected.truncate(rng.gen_range(1..=projected.len()));
        projected.sort();
        QueryForm::Select {
            distinct: true,
            vars: projected,
        }
    };
    Query {
        form,
        pattern: GraphPattern { patterns, filters },
    }
}

/// A random pre-binding over the query's variables.
pub fn random_pre_binding(rng: &mut StdRng, query: &Query) -> Solution {
    let vars: Vec<String> = query.pattern.pattern_variables().into_iter().collect();
    let terms = term_pool();
    let mut pre = Solution::new();
    for v in vars {
        if rng.gen_bool(0.25) {
            pre.set(v, terms[rng.gen_range(0..terms.len())].clone());
        }
    }
    pre
}

/// Runs `cases` random (graph, query, pre-binding) triples through the
/// renderer, the parser, the evaluator and the brute-force oracle; returns
/// the first disagreement.
pub fn check_oracle_agreement(cases: usize, seed: u64) -> Result<(), String> {
    use rand::SeedableRng;
    let mut rng = StdRng::seed_from_u64(seed);
    for case in 0..cases {
        let graph = random_graph(&mut rng, 50);
        let query = random_query(&mut rng, 3);
        let pre = random_pre_binding(&mut rng, &query);
        check_one_case(&graph, &query, &pre)
            .map_err(|e| format!("case {case} (seed {seed}): {e}"))?;
    }
    Ok(())
}

pub fn check_one_case(graph: &Graph, query: &Query, pre: &Solution) -> Result<(), String> {
    let text = query.to_string();
    let parsed = spn_core::sparql::parse_sparql(&text, graph.prefixes())
        .map_err(|e| format!("rendered query failed to parse: {e}\n{text}"))?;
    let evaluated = spn_core::sparql::eval(&parsed, graph, pre)
        .map_err(|e| format!("evaluator error: {e}\n{text}"))?;
    let brute = brute_eval(query, graph, pre).map_err(|e| format!("oracle error: {e}\n{text}"))?;
    match (&evaluated, &brute) {
        (spn_core::sparql::QueryResult::Boolean(a), BruteResult::Boolean(b)) if a == b => Ok(()),
        (spn_core::sparql::QueryResult::Solutions(a), BruteResult::Solutions(b)) if a == b => {
            Ok(())
        }
        _ => Err(format!(
            "disagreement on query:\n{text}\nevaluator: {evaluated:?}\noracle: {brute:?}\n\
             graph ({} triples):\n{}",
            graph.len(),
            spn_core::rdf::serialize_turtle(graph)
        )),
    }
}

// ---------------------------------------------------------------------------
// Explicit-state sweep oracle
// ---------------------------------------------------------------------------

pub type OracleState = BTreeMap<String, BTreeSet<String>>;

/// A single-argument move transition with a closure guard over the whole
/// explicit state and the current tick.
pub struct OracleTransition {
    pub name: String,
    pub from: String,
    pub to: String,
    pub guard: Box<dyn Fn(&OracleState, &str, u64) -> bool>,
    pub per_tick_quota: Option<u64>,
}

pub struct OracleNet {
    pub transitions: Vec<OracleTransition>,
}

impl OracleNet {
    /// One tick with sweep-until-quiescent semantics in canonical order
    /// (transition name, then token). Returns the number of firings.
    pub fn tick(&mut self, state: &mut OracleState, now: u64) -> u64 {
        let mut total = 0u64;
        let mut quota_used: BTreeMap<String, u64> = BTreeMap::new();
        loop {
            let mut fired = 0u64;
            let mut order: Vec<usize> = (0..self.transitions.len()).collect();
            order.sort_by(|a, b| self.transitions[*a].name.cmp(&self.transitions[*b].name));
            for idx in order {
                let t = &self.transitions[idx];
                let tokens: Vec<String> = state
                    .get(&t.from)
                    .map(|s| s.iter().cloned().collect())
                    .unwrap_or_default();
                for tok in tokens {
                    if let Some(max) = t.per_tick_quota {
                        if quota_used.get(&t.name).copied().unwrap_or(0) >= max {
                            continue;
                        }
                    }
                    if !state.get(&t.from).is_some_and(|s| s.contains(&tok)) {
                        continue;
                    }
                    if !(t.guard)(state, &tok, now) {
                        continue;
                    }
                    // Set semantics in the destination.
                    if state.get(&t.to).is_some_and(|s| s.contains(&tok)) {
                        continue;
                    }
                    state.get_mut(&t.from).expect("source exists").remove(&tok);
                    state.entry(t.to.clone()).or_default().insert(tok.clone());
                    *quota_used.entry(t.name.clone()).or_insert(0) += 1;
                    fired += 1;
                    total += 1;
                }
            }
            if fired == 0 {
                break;
            }
        }
        total
    }
}

/// Event-log checks shared by the scenario suites.
pub mod log_checks {
    use std::collections::BTreeMap;

    use spn_core::runtime::FiringRecord;
    use spn_core::Term;

    /// Move-only firings (every record here consumes and produces the same
    /// single token) keep the total token count unchanged; verify record
    /// shape.
    pub fn assert_moves_conserve(events: &[FiringRecord]) {
        for e in events {
            assert_eq!(
                e.consumed.len(),
                e.produced.len(),
                "non-conserving firing of {} at tick {}",
                e.transition,
                e.tick
            );
            let consumed: Vec<&Term> = e.consumed.iter().map(|(_, t)| t).collect();
            let produced: Vec<&Term> = e.produced.iter().map(|(_, t)| t).collect();
            assert_eq!(consumed, produced, "firing of {} moved different tokens", e.transition);
        }
    }

    /// Tokens only ever move forward along their place ranking.
    pub fn assert_no_backward_moves(events: &[FiringRecord], rank: &BTreeMap<Term, u32>) {
        for e in events {
            for ((from, tok), (to, _)) in e.consumed.iter().zip(e.produced.iter()) {
                let (Some(a), Some(b)) = (rank.get(from), rank.get(to)) else {
                    continue;
                };
                assert!(
                    a < b,
                    "token {tok} moved backward {from} -> {to} at tick {}",
                    e.tick
                );
            }
        }
    }

    /// No transition exceeds its per-tick quota anywhere in the log.
    pub fn assert_quotas_respected(events: &[FiringRecord], quotas: &BTreeMap<Term, u64>) {
        let mut per_tick: BTreeMap<(u64, &Term), u64> = BTreeMap::new();
        for e in events {
            *per_tick.entry((e.tick, &e.transition)).or_insert(0) += 1;
        }
        for ((tick, transition), count) in per_tick {
            if let Some(max) = quotas.get(transition) {
                assert!(
                    count <= *max,
                    "{transition} fired {count} times in tick {tick}, quota {max}"
                );
            }
        }
    }

    /// Every token's successive moves are at least `min` ticks apart.
    pub fn assert_move_spacing(events: &[FiringRecord], min: u64) {
        let mut last_move: BTreeMap<&Term, u64> = BTreeMap::new();
        for e in events {
            for (_, tok) in e.consumed.iter() {
                if let Some(prev) = last_move.get(tok) {
                    assert!(
                        e.tick - prev >= min,
                        "token {tok} moved at ticks {prev} and {} (minimum spacing {min})",
                        e.tick
                    );
                }
            }
            for (_, tok) in e.consumed.iter().chain(e.produced.iter()) {
                last_move.insert(tok, e.tick);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Micro-model corpus for unfolding equivalence
// ---------------------------------------------------------------------------

/// Named micro models, each within the tabulation bounds, exercising a
/// different guard/arc feature.
pub fn micro_model_corpus() -> Vec<(&'static str, String)> {
    let mut corpus: Vec<(&'static str, String)> = Vec::new();

    corpus.push((
        "token_ring",
        r#"
proj:p1 a spn:Place; ldp:contains proj:tok.
proj:p2 a spn:Place.
proj:p3 a spn:Place.
proj:t12 a spn:Transition; spn:hasArg "?X".
proj:t23 a spn:Transition; spn:hasArg "?X".
proj:t31 a spn:Transition; spn:hasArg "?X".
proj:a1 a spn:ArcP2T; spn:relPlace proj:p1; spn:relTransition proj:t12; spn:hasArg "?X".
proj:b1 a spn:ArcT2P; spn:relPlace proj:p2; spn:relTransition proj:t12; spn:hasArg "?X".
proj:a2 a spn:ArcP2T; spn:relPlace proj:p2; spn:relTransition proj:t23; spn:hasArg "?X".
proj:b2 a spn:ArcT2P; spn:relPlace proj:p3; spn:relTransition proj:t23; spn:hasArg "?X".
proj:a3 a spn:ArcP2T; spn:relPlace proj:p3; spn:relTransition proj:t31; spn:hasArg "?X".
proj:b3 a spn:ArcT2P; spn:relPlace proj:p1; spn:relTransition proj:t31; spn:hasArg "?X".
"#
        .to_string(),
    ));

    corpus.push((
        "linear_chain_one_token",
        r#"
proj:p1 a spn:Place; ldp:contains proj:tok.
proj:p2 a spn:Place.
proj:p3 a spn:Place.
proj:t12 a spn:Transition; spn:hasArg "?X".
proj:t23 a spn:Transition; spn:hasArg "?X".
proj:a1 a spn:ArcP2T; spn:relPlace proj:p1; spn:relTransition proj:t12; spn:hasArg "?X".
proj:b1 a spn:ArcT2P; spn:relPlace proj:p2; spn:relTransition proj:t12; spn:hasArg "?X".
proj:a2 a spn:ArcP2T; spn:relPlace proj:p2; spn:relTransition proj:t23; spn:hasArg "?X".
proj:b2 a spn:ArcT2P; spn:relPlace proj:p3; spn:relTransition proj:t23; spn:hasArg "?X".
"#
        .to_string(),
    ));

    corpus.push((
        "linear_chain_two_tokens",
        r#"
proj:p1 a spn:Place; ldp:contains proj:tokA, proj:tokB.
proj:p2 a spn:Place.
proj:t a spn:Transition; spn:hasArg "?X".
proj:a a spn:ArcP2T; spn:relPlace proj:p1; spn:relTransition proj:t; spn:hasArg "?X".
proj:b a spn:ArcT2P; spn:relPlace proj:p2; spn:relTransition proj:t; spn:hasArg "?X".
"#
        .to_string(),
    ));

    corpus.push((
        "competing_fork",
        r#"
proj:src a spn:Place; ldp:contains proj:tok.
proj:left a spn:Place.
proj:right a spn:Place.
proj:tl a spn:Transition; spn:hasArg "?X".
proj:tr a spn:Transition; spn:hasArg "?X".
proj:al a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:tl; spn:hasArg "?X".
proj:bl a spn:ArcT2P; spn:relPlace proj:left; spn:relTransition proj:tl; spn:hasArg "?X".
proj:ar a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:tr; spn:hasArg "?X".
proj:br a spn:ArcT2P; spn:relPlace proj:right; spn:relTransition proj:tr; spn:hasArg "?X".
"#
        .to_string(),
    ));

    corpus.push((
        "independent_moves",
        r#"
proj:p1 a spn:Place; ldp:contains proj:tokA.
proj:p2 a spn:Place; ldp:contains proj:tokB.
proj:d1 a spn:Place.
proj:d2 a spn:Place.
proj:t1 a spn:Transition; spn:hasArg "?X".
proj:t2 a spn:Transition; spn:hasArg "?X".
proj:a1 a spn:ArcP2T; spn:relPlace proj:p1; spn:relTransition proj:t1; spn:hasArg "?X".
proj:b1 a spn:ArcT2P; spn:relPlace proj:d1; spn:relTransition proj:t1; spn:hasArg "?X".
proj:a2 a spn:ArcP2T; spn:relPlace proj:p2; spn:relTransition proj:t2; spn:hasArg "?X".
proj:b2 a spn:ArcT2P; spn:relPlace proj:d2; spn:relTransition proj:t2; spn:hasArg "?X".
"#
        .to_string(),
    ));

    corpus.push((
        "lock_guarded_move",
        r#"
proj:lock a spn:Place; ldp:contains proj:key.
proj:away a spn:Place.
proj:src a spn:Place; ldp:contains proj:tok.
proj:dst a spn:Place.
proj:unlock a spn:Transition; spn:hasArg "?K".
proj:ul a spn:ArcP2T; spn:relPlace proj:lock; spn:relTransition proj:unlock; spn:hasArg "?K".
proj:um a spn:ArcT2P; spn:relPlace proj:away; spn:relTransition proj:unlock; spn:hasArg "?K".
proj:move a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:g.
proj:g a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:lock ldp:contains proj:key }".
proj:mi a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:move; spn:hasArg "?X".
proj:mo a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:move; spn:hasArg "?X".
"#
        .to_string(),
    ));

    corpus.push((
        "absence_guarded_move",
        r#"
proj:lock a spn:Place; ldp:contains proj:key.
proj:away a spn:Place.
proj:src a spn:Place; ldp:contains proj:tok.
proj:dst a spn:Place.
proj:unlock a spn:Transition; spn:hasArg "?K".
proj:ul a spn:ArcP2T; spn:relPlace proj:lock; spn:relTransition proj:unlock; spn:hasArg "?K".
proj:um a spn:ArcT2P; spn:relPlace proj:away; spn:relTransition proj:unlock; spn:hasArg "?K".
proj:move a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:gn.
proj:gn a spn:CompoundRule; spn:operator "NOT"; spn:subRule proj:ga.
proj:ga a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:lock ldp:contains proj:key }".
proj:mi a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:move; spn:hasArg "?X".
proj:mo a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:move; spn:hasArg "?X".
"#
        .to_string(),
    ));

    // The level-end pattern: one level whose elements must all reach the
    // terminal place before the level may advance.
    corpus.push((
        "containment_path_guard",
        r#"
proj:level1 a ifc4:IfcBuildingStorey; ifc4:containsElements proj:rel1.
proj:rel1 ifc4:RelatedElements proj:e1, proj:e2.
proj:work a spn:Place; bimsn:disciplineTag "STRUCT"; bimsn:stateTag "RUN";
    ldp:contains proj:e1, proj:e2.
proj:done a spn:Place; bimsn:disciplineTag "STRUCT"; bimsn:stateTag "END".
proj:lactive a spn:Place; bimsn:disciplineTag "STRUCT"; bimsn:stateTag "RUN";
    ldp:contains proj:level1.
proj:ldone a spn:Place; bimsn:disciplineTag "STRUCT"; bimsn:stateTag "END".
proj:finish a spn:Transition; spn:hasArg "?E".
proj:fi a spn:ArcP2T; spn:relPlace proj:work; spn:relTransition proj:finish; spn:hasArg "?E".
proj:fo a spn:ArcT2P; spn:relPlace proj:done; spn:relTransition proj:finish; spn:hasArg "?E".
proj:lend a spn:Transition; bimsn:disciplineTag "STRUCT";
    spn:guardRule proj:cr; spn:hasArg "?TOKEN".
proj:cr a spn:CompoundRule; spn:operator "NOT"; spn:subRule proj:sr.
proj:sr a spn:SPARQLRule; spn:hasSPARQL "ASK {
    ?place a spn:Place.
    ?place bimsn:disciplineTag ?dTag1.
    ?SELF bimsn:disciplineTag ?dTag2.
    ?place bimsn:stateTag ?sTag.
    FILTER (?dTag1 = ?dTag2 && ?sTag != 'END')
    ?TOKEN ifc4:containsElements/ifc4:RelatedElements ?elem.
    ?place ldp:contains ?elem. }".
proj:li a spn:ArcP2T; spn:relPlace proj:lactive; spn:relTransition proj:lend; spn:hasArg "?TOKEN".
proj:lo a spn:ArcT2P; spn:relPlace proj:ldone; spn:relTransition proj:lend; spn:hasArg "?TOKEN".
"#
        .to_string(),
    ));

    corpus.push((
        "two_argument_pair_move",
        r#"
proj:xs a spn:Place; ldp:contains proj:x1.
proj:ys a spn:Place; ldp:contains proj:y1, proj:y2.
proj:dx a spn:Place.
proj:dy a spn:Place.
proj:pair a spn:Transition; spn:hasArg "?A"; spn:hasArg "?B".
proj:ia a spn:ArcP2T; spn:relPlace proj:xs; spn:relTransition proj:pair; spn:hasArg "?A".
proj:ib a spn:ArcP2T; spn:relPlace proj:ys; spn:relTransition proj:pair; spn:hasArg "?B".
proj:oa a spn:ArcT2P; spn:relPlace proj:dx; spn:relTransition proj:pair; spn:hasArg "?A".
proj:ob a spn:ArcT2P; spn:relPlace proj:dy; spn:relTransition proj:pair; spn:hasArg "?B".
"#
        .to_string(),
    ));

    corpus.push((
        "condition_rule_guard",
        r#"
proj:lock a spn:Place; ldp:contains proj:key.
proj:away a spn:Place.
proj:src a spn:Place; ldp:contains proj:tok.
proj:dst a spn:Place.
proj:unlock a spn:Transition; spn:hasArg "?K".
proj:ul a spn:ArcP2T; spn:relPlace proj:lock; spn:relTransition proj:unlock; spn:hasArg "?K".
proj:um a spn:ArcT2P; spn:relPlace proj:away; spn:relTransition proj:unlock; spn:hasArg "?K".
proj:move a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:cond.
proj:cond a spn:ConditionRule; spn:if proj:ifr; spn:then proj:thenr; spn:else proj:elser.
proj:ifr a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:lock ldp:contains proj:key }".
proj:thenr a spn:ConstantRule; spn:hasValue "false"^^xsd:boolean.
proj:elser a spn:ConstantRule; spn:hasValue "true"^^xsd:boolean.
proj:mi a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:move; spn:hasArg "?X".
proj:mo a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:move; spn:hasArg "?X".
"#
        .to_string(),
    ));

    corpus.push((
        "xor_guarded_move",
        r#"
proj:l1 a spn:Place; ldp:contains proj:k1.
proj:l2 a spn:Place; ldp:contains proj:k2.
proj:away a spn:Place.
proj:src a spn:Place; ldp:contains proj:tok.
proj:dst a spn:Place.
proj:u1 a spn:Transition; spn:hasArg "?K".
proj:u1i a spn:ArcP2T; spn:relPlace proj:l1; spn:relTransition proj:u1; spn:hasArg "?K".
proj:u1o a spn:ArcT2P; spn:relPlace proj:away; spn:relTransition proj:u1; spn:hasArg "?K".
proj:u2 a spn:Transition; spn:hasArg "?K".
proj:u2i a spn:ArcP2T; spn:relPlace proj:l2; spn:relTransition proj:u2; spn:hasArg "?K".
proj:u2o a spn:ArcT2P; spn:relPlace proj:away; spn:relTransition proj:u2; spn:hasArg "?K".
proj:move a spn:Transition; spn:hasArg "?X"; spn:guardRule proj:x.
proj:x a spn:CompoundRule; spn:operator "XOR"; spn:subRule proj:x1; spn:subRule proj:x2.
proj:x1 a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:l1 ldp:contains proj:k1 }".
proj:x2 a spn:SPARQLRule; spn:hasSPARQL "ASK { proj:l2 ldp:contains proj:k2 }".
proj:mi a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:move; spn:hasArg "?X".
proj:mo a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:move; spn:hasArg "?X".
"#
        .to_string(),
    ));

    corpus.push((
        "typed_argument_move",
        r#"
proj:w1 a ifc4:IfcWall.
proj:d1 a ifc4:IfcDoor.
proj:src a spn:Place; ldp:contains proj:w1, proj:d1.
proj:dst a spn:Place.
proj:t a spn:Transition; spn:hasArg proj:argdef.
proj:argdef a spn:ArgDef; spn:argName "?X"; spn:argType ifc4:IfcWall.
proj:in a spn:ArcP2T; spn:relPlace proj:src; spn:relTransition proj:t; spn:hasArg proj:argdef.
proj:out a spn:ArcT2P; spn:relPlace proj:dst; spn:relTransition proj:t; spn:hasArg proj:argdef.
"#
        .to_string(),
    ));

    corpus.push((
        "select_arc_expression",
        r#"
proj:w1 a ifc4:IfcWall. proj:w2 a ifc4:IfcWall.
proj:trigger a spn:Place; ldp:contains proj:go.
proj:spent a spn:Place.
proj:pool a spn:Place.
proj:dispatch a spn:Transition; spn:hasArg "?X".
proj:di a spn:ArcP2T; spn:relPlace proj:trigger; spn:relTransition proj:dispatch; spn:hasArg "?X".
proj:ds a spn:ArcT2P; spn:relPlace proj:spent; spn:relTransition proj:dispatch; spn:hasArg "?X".
proj:do a spn:ArcT2P; spn:relPlace proj:pool; spn:relTransition proj:dispatch;
    spn:hasArg "?X"; spn:arcExpr proj:sel.
proj:sel a spn:SPARQLRule; spn:hasSPARQL "SELECT ?W WHERE { ?W a ifc4:IfcWall }".
"#
        .to_string(),
    ));

    corpus
}
