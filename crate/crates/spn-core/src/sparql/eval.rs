//! Query evaluation over a graph snapshot.
//!
//! Pre-bound variables are substituted into the pattern as constants before
//! matching. Joins pick the most-bound pattern first; filters prune as soon
//! as their variables are bound. All of it is pure over an immutable graph,
//! so concurrent evaluation against a quiescent graph is safe.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::rdf::{Graph, Term};
use crate::sparql::ast::{
    CmpOp, FilterExpr, Operand, PatternTerm, Predicate, Query, QueryForm, QueryResult, Solution,
    TriplePattern,
};

/// Evaluation failures. Comparison type mismatches are not errors (they
/// drop the solution); only a FILTER variable that no pattern or pre-bound
/// value can ever bind is.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable ?{variable} in FILTER is unbound after substitution")]
pub struct EvalError {
    pub variable: String,
}

/// Evaluates a query with `pre_bound` substituted in first.
///
/// ASK yields a boolean; SELECT yields deduplicated solutions in canonical
/// order, each extending `pre_bound`.
pub fn eval(q: &Query, g: &Graph, pre_bound: &Solution) -> Result<QueryResult, EvalError> {
    let (patterns, filters) = substitute(&q.pattern.patterns, &q.pattern.filters, pre_bound);
    let flat = expand_paths(&patterns);
    check_filter_vars(&flat, &filters)?;

    match &q.form {
        QueryForm::Ask => {
            let mut found = false;
            visit_solutions(g, &flat, &filters, &mut |_| {
                found = true;
                ControlFlow::Break(())
            });
            Ok(QueryResult::Boolean(found))
        }
        QueryForm::Select { vars, .. } => {
            let mut results: BTreeSet<Solution> = BTreeSet::new();
            visit_solutions(g, &flat, &filters, &mut |sol| {
                let mut projected: Solution = pre_bound.clone();
                for v in vars {
                    let value = sol.get(v).or_else(|| pre_bound.get(v));
                    if let Some(t) = value {
                        projected.set(v.clone(), t.clone());
                    }
                }
                results.insert(projected);
                ControlFlow::Continue(())
            });
            Ok(QueryResult::Solutions(results.into_iter().collect()))
        }
    }
}

/// True iff a chain of triples connects `s` to `o` through `path` in order.
pub fn eval_exists_path(g: &Graph, s: &Term, path: &[Term], o: &Term) -> bool {
    debug_assert!(!path.is_empty(), "path must be non-empty");
    if path.is_empty() {
        return false;
    }
    let mut frontier: BTreeSet<Term> = BTreeSet::new();
    frontier.insert(s.clone());
    for step in path {
        let mut next = BTreeSet::new();
        for node in &frontier {
            next.extend(g.objects(node, step).cloned());
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    frontier.contains(o)
}

/// A primitive (s, p, o) pattern after sequence paths are expanded into
/// chains through synthetic variables. Synthetic names start with a space,
/// which the parser can never produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FlatPattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

pub(crate) fn expand_paths(patterns: &[TriplePattern]) -> Vec<FlatPattern> {
    let mut out = Vec::new();
    for (i, p) in patterns.iter().enumerate() {
        match &p.predicate {
            Predicate::Single(pred) => out.push(FlatPattern {
                s: p.subject.clone(),
                p: pred.clone(),
                o: p.object.clone(),
            }),
            Predicate::Path(steps) => {
                let mut current = p.subject.clone();
                for (j, step) in steps.iter().enumerate() {
                    let target = if j + 1 == steps.len() {
                        p.object.clone()
                    } else {
                        PatternTerm::Var(format!(" path{i}_{j}"))
                    };
                    out.push(FlatPattern {
                        s: current,
                        p: PatternTerm::Term(step.clone()),
                        o: target.clone(),
                    });
                    current = target;
                }
            }
        }
    }
    out
}

pub(crate) fn substitute(
    patterns: &[TriplePattern],
    filters: &[FilterExpr],
    pre_bound: &Solution,
) -> (Vec<TriplePattern>, Vec<FilterExpr>) {
    let sub_pt = |pt: &PatternTerm| -> PatternTerm {
        match pt {
            PatternTerm::Var(v) => match pre_bound.get(v) {
                Some(t) => PatternTerm::Term(t.clone()),
                None => pt.clone(),
            },
            PatternTerm::Term(_) => pt.clone(),
        }
    };
    let patterns = patterns
        .iter()
        .map(|p| TriplePattern {
            subject: sub_pt(&p.subject),
            predicate: match &p.predicate {
                Predicate::Single(pt) => Predicate::Single(sub_pt(pt)),
                path @ Predicate::Path(_) => path.clone(),
            },
            object: sub_pt(&p.object),
        })
        .collect();
    let filters = filters.iter().map(|f| substitute_filter(f, pre_bound)).collect();
    (patterns, filters)
}

fn substitute_filter(f: &FilterExpr, pre_bound: &Solution) -> FilterExpr {
    let sub_op = |op: &Operand| -> Operand {
        match op {
            Operand::Var(v) => match pre_bound.get(v) {
                Some(t) => Operand::Const(t.clone()),
                None => op.clone(),
            },
            Operand::Const(_) => op.clone(),
        }
    };
    match f {
        FilterExpr::Compare(op, a, b) => FilterExpr::Compare(*op, sub_op(a), sub_op(b)),
        FilterExpr::And(a, b) => FilterExpr::And(
            Box::new(substitute_filter(a, pre_bound)),
            Box::new(substitute_filter(b, pre_bound)),
        ),
        FilterExpr::Or(a, b) => FilterExpr::Or(
            Box::new(substitute_filter(a, pre_bound)),
            Box::new(substitute_filter(b, pre_bound)),
        ),
        FilterExpr::Not(e) => FilterExpr::Not(Box::new(substitute_filter(e, pre_bound))),
    }
}

fn check_filter_vars(flat: &[FlatPattern], filters: &[FilterExpr]) -> Result<(), EvalError> {
    let mut pattern_vars = BTreeSet::new();
    for p in flat {
        for pt in [&p.s, &p.p, &p.o] {
            if let PatternTerm::Var(v) = pt {
                pattern_vars.insert(v.clone());
            }
        }
    }
    let mut filter_vars = BTreeSet::new();
    for f in filters {
        f.variables(&mut filter_vars);
    }
    for v in filter_vars {
        if !pattern_vars.contains(&v) {
            return Err(EvalError { variable: v });
        }
    }
    Ok(())
}

/// Backtracking join over the flattened patterns, invoking `visit` for each
/// complete solution. Filters are applied the moment their variables bind.
pub(crate) fn visit_solutions(
    g: &Graph,
    flat: &[FlatPattern],
    filters: &[FilterExpr],
    visit: &mut dyn FnMut(&Solution) -> ControlFlow<()>,
) {
    let filter_vars: Vec<BTreeSet<String>> = filters
        .iter()
        .map(|f| {
            let mut vars = BTreeSet::new();
            f.variables(&mut vars);
            vars
        })
        .collect();
    let mut remaining: Vec<usize> = (0..flat.len()).collect();
    let mut sol = Solution::new();
    let _ = search(
        g,
        flat,
        filters,
        &filter_vars,
        0,
        &mut remaining,
        &mut sol,
        visit,
    );
}

#[allow(clippy::too_many_arguments)]
fn search(
    g: &Graph,
    flat: &[FlatPattern],
    filters: &[FilterExpr],
    filter_vars: &[BTreeSet<String>],
    applied: u128,
    remaining: &mut Vec<usize>,
    sol: &mut Solution,
    visit: &mut dyn FnMut(&Solution) -> ControlFlow<()>,
) -> ControlFlow<()> {
    // Filters whose variables are all bound and not applied yet.
    let mut applied = applied;
    for (i, vars) in filter_vars.iter().enumerate() {
        let bit = 1u128 << (i % 128);
        if applied & bit == 0 && vars.iter().all(|v| sol.contains(v)) {
            match eval_filter(&filters[i], sol) {
                Ok(true) => applied |= bit,
                Ok(false) => return ControlFlow::Continue(()),
                // Unbindable variables are rejected up front; unreachable here.
                Err(_) => return ControlFlow::Continue(()),
            }
        }
    }

    if remaining.is_empty() {
        return visit(sol);
    }

    // Most-bound pattern first; stable on ties.
    let (slot, _) = remaining
        .iter()
        .enumerate()
        .max_by_key(|(i, &idx)| {
            let p = &flat[idx];
            let score: usize = [&p.s, &p.p, &p.o]
                .iter()
                .map(|pt| match pt {
                    PatternTerm::Term(_) => 1,
                    PatternTerm::Var(v) => usize::from(sol.contains(v)),
                })
                .sum();
            (score, usize::MAX - i)
        })
        .expect("remaining is non-empty");
    let idx = remaining.remove(slot);
    let pattern = &flat[idx];

    let resolve = |pt: &PatternTerm, sol: &Solution| -> Option<Term> {
        match pt {
            PatternTerm::Term(t) => Some(t.clone()),
            PatternTerm::Var(v) => sol.get(v).cloned(),
        }
    };
    let s = resolve(&pattern.s, sol);
    let p = resolve(&pattern.p, sol);
    let o = resolve(&pattern.o, sol);

    let candidates: Vec<_> = g
        .matching(s.as_ref(), p.as_ref(), o.as_ref())
        .cloned()
        .collect();
    'next: for triple in candidates {
        let mut bound_here: Vec<String> = Vec::new();
        for (pt, actual) in [
            (&pattern.s, &triple.subject),
            (&pattern.p, &triple.predicate),
            (&pattern.o, &triple.object),
        ] {
            if let PatternTerm::Var(v) = pt {
                match sol.get(v) {
                    Some(existing) if existing != actual => {
                        // Same variable twice in this pattern with different
                        // terms: undo and skip.
                        for b in &bound_here {
                            sol.remove(b);
                        }
                        continue 'next;
                    }
                    Some(_) => {}
                    None => {
                        sol.set(v.clone(), actual.clone());
                        bound_here.push(v.clone());
                    }
                }
            }
        }
        let flow = search(
            g,
            flat,
            filters,
            filter_vars,
            applied,
            remaining,
            sol,
            visit,
        );
        for b in &bound_here {
            sol.remove(b);
        }
        if flow.is_break() {
            remaining.insert(slot, idx);
            return ControlFlow::Break(());
        }
    }
    remaining.insert(slot, idx);
    ControlFlow::Continue(())
}

fn eval_filter(f: &FilterExpr, sol: &Solution) -> Result<bool, EvalError> {
    match f {
        FilterExpr::Compare(op, a, b) => {
            let left = operand_term(a, sol)?;
            let right = operand_term(b, sol)?;
            Ok(compare_terms(*op, left, right))
        }
        FilterExpr::And(a, b) => Ok(eval_filter(a, sol)? && eval_filter(b, sol)?),
        FilterExpr::Or(a, b) => Ok(eval_filter(a, sol)? || eval_filter(b, sol)?),
        FilterExpr::Not(e) => Ok(!eval_filter(e, sol)?),
    }
}

fn operand_term<'a>(op: &'a Operand, sol: &'a Solution) -> Result<&'a Term, EvalError> {
    match op {
        Operand::Const(t) => Ok(t),
        Operand::Var(v) => sol.get(v).ok_or_else(|| EvalError {
            variable: v.clone(),
        }),
    }
}

/// Comparison semantics: numeric literals compare numerically; otherwise
/// both sides must be the same kind of term (and literals must agree on
/// datatype and language) and compare lexically. Mismatches are `false`,
/// never an error.
pub(crate) fn compare_terms(op: CmpOp, a: &Term, b: &Term) -> bool {
    use std::cmp::Ordering;

    let ordering: Option<Ordering> = match (a, b) {
        (Term::Literal(la), Term::Literal(lb)) => {
            match (la.numeric_value(), lb.numeric_value()) {
                (Some(x), Some(y)) => x.partial_cmp(&y),
                _ => {
                    if la.datatype == lb.datatype && la.language == lb.language {
                        Some(la.value.cmp(&lb.value))
                    } else {
                        None
                    }
                }
            }
        }
        (Term::Iri(x), Term::Iri(y)) => Some(x.cmp(y)),
        (Term::Blank(x), Term::Blank(y)) => Some(x.cmp(y)),
        _ => None,
    };
    let Some(ord) = ordering else {
        return false;
    };
    match op {
        CmpOp::Eq => ord == Ordering::Equal,
        CmpOp::Ne => ord != Ordering::Equal,
        CmpOp::Lt => ord == Ordering::Less,
        CmpOp::Le => ord != Ordering::Greater,
        CmpOp::Gt => ord == Ordering::Greater,
        CmpOp::Ge => ord != Ordering::Less,
    }
}

/// Terms bound to the first projected variable, for rules that feed token
/// sets.
pub fn select_terms(result: &QueryResult, first_var: &str) -> BTreeSet<Term> {
    match result {
        QueryResult::Solutions(sols) => sols
            .iter()
            .filter_map(|s| s.get(first_var).cloned())
            .collect(),
        QueryResult::Boolean(_) => BTreeSet::new(),
    }
}
