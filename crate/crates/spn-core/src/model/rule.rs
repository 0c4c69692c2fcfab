//! Rule trees: SPARQL and constant leaves combined by logical operators and
//! conditionals, plus their RDF encoding.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::error::ValidationError;
use crate::model::vocab;
use crate::rdf::{Graph, Term, Triple};
use crate::sparql::{
    self, parse_sparql, EvalError, Query, QueryForm, QueryResult, Solution, SparqlParseError,
};

/// The reserved pre-bound variable naming the node that owns the rule being
/// evaluated (transition for guards, place for color/init rules, arc for
/// arc expressions). Stored without the leading `?`.
pub const SELF_VAR: &str = "SELF";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LogicalOp {
    And,
    Or,
    Xor,
    Not,
}

impl LogicalOp {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "AND" => Some(LogicalOp::And),
            "OR" => Some(LogicalOp::Or),
            "XOR" => Some(LogicalOp::Xor),
            "NOT" => Some(LogicalOp::Not),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LogicalOp::And => "AND",
            LogicalOp::Or => "OR",
            LogicalOp::Xor => "XOR",
            LogicalOp::Not => "NOT",
        }
    }
}

impl fmt::Display for LogicalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A SPARQL leaf keeps the source text alongside the parsed query so the
/// RDF encoding round-trips exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparqlLeaf {
    pub text: String,
    pub query: Query,
}

impl SparqlLeaf {
    pub fn parse(text: impl Into<String>, g: &Graph) -> Result<Self, SparqlParseError> {
        let text = text.into();
        let query = parse_sparql(&text, g.prefixes())?;
        Ok(SparqlLeaf { text, query })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Sparql(SparqlLeaf),
    Constant(Term),
    Compound {
        op: LogicalOp,
        subs: Vec<Rule>,
    },
    Condition {
        condition: Box<Rule>,
        then_rule: Box<Rule>,
        else_rule: Box<Rule>,
    },
}

/// What a rule produces: a boolean or a token set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Boolean,
    TokenSet,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleKind::Boolean => f.write_str("boolean"),
            RuleKind::TokenSet => f.write_str("token set"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleValue {
    Bool(bool),
    Tokens(BTreeSet<Term>),
}

impl RuleValue {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            RuleValue::Bool(b) => Some(*b),
            RuleValue::Tokens(_) => None,
        }
    }

    pub fn into_tokens(self) -> Option<BTreeSet<Term>> {
        match self {
            RuleValue::Tokens(t) => Some(t),
            RuleValue::Bool(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule type error: expected {expected}, got {got}")]
    Type { expected: RuleKindMsg, got: RuleKindMsg },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

// Small wrapper so thiserror can display RuleKind without exposing Display
// bounds in the variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleKindMsg(pub RuleKind);

impl fmt::Display for RuleKindMsg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Rule {
    /// The kind a well-formed rule produces, decided statically so that
    /// misplaced SELECT/ASK leaves fail at load time rather than at fire
    /// time.
    pub fn static_kind(&self) -> Result<RuleKind, String> {
        match self {
            Rule::Sparql(leaf) => Ok(match leaf.query.form {
                QueryForm::Ask => RuleKind::Boolean,
                QueryForm::Select { .. } => RuleKind::TokenSet,
            }),
            Rule::Constant(term) => Ok(if term.as_bool().is_some() {
                RuleKind::Boolean
            } else {
                RuleKind::TokenSet
            }),
            Rule::Compound { op, subs } => {
                if *op == LogicalOp::Not && subs.len() != 1 {
                    return Err(format!(
                        "NOT rule must have exactly 1 sub-rule, found {}",
                        subs.len()
                    ));
                }
                if subs.is_empty() {
                    return Err("compound rule needs at least 1 sub-rule".to_string());
                }
                for sub in subs {
                    let kind = sub.static_kind()?;
                    if kind != RuleKind::Boolean {
                        return Err(format!(
                            "sub-rule of {op} must be boolean, found {kind}"
                        ));
                    }
                }
                Ok(RuleKind::Boolean)
            }
            Rule::Condition {
                condition,
                then_rule,
                else_rule,
            } => {
                if condition.static_kind()? != RuleKind::Boolean {
                    return Err("condition rule's if must be boolean".to_string());
                }
                let then_kind = then_rule.static_kind()?;
                let else_kind = else_rule.static_kind()?;
                if then_kind != else_kind {
                    return Err(format!(
                        "condition branches disagree: then is {then_kind}, else is {else_kind}"
                    ));
                }
                Ok(then_kind)
            }
        }
    }
}

/// Per-evaluation counters and an optional event trace for tests.
#[derive(Debug, Default)]
pub struct RuleTrace {
    pub leaf_evals: u64,
    pub record: bool,
    pub events: Vec<TraceEvent>,
}

impl RuleTrace {
    pub fn recording() -> Self {
        RuleTrace {
            record: true,
            ..Default::default()
        }
    }

    fn event(&mut self, e: TraceEvent) {
        if self.record {
            self.events.push(e);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    SparqlLeaf,
    ConstantLeaf,
    ThenBranch,
    ElseBranch,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RuleEvalOptions {
    /// Short-circuit AND/OR. Affects work done, never results; strict
    /// evaluation keeps leaf counters comparable across configurations.
    pub short_circuit: bool,
}

/// Evaluates a rule tree against a graph snapshot.
///
/// `owner` is bound to `?SELF`; `pre_bound` carries the transition-binding
/// arguments.
pub fn eval_rule(
    rule: &Rule,
    g: &Graph,
    pre_bound: &Solution,
    owner: &Term,
    opts: RuleEvalOptions,
    trace: &mut RuleTrace,
) -> Result<RuleValue, RuleError> {
    let mut bound = pre_bound.clone();
    bound.set(SELF_VAR, owner.clone());
    eval_inner(rule, g, &bound, opts, trace)
}

pub fn eval_rule_bool(
    rule: &Rule,
    g: &Graph,
    pre_bound: &Solution,
    owner: &Term,
    opts: RuleEvalOptions,
    trace: &mut RuleTrace,
) -> Result<bool, RuleError> {
    match eval_rule(rule, g, pre_bound, owner, opts, trace)? {
        RuleValue::Bool(b) => Ok(b),
        RuleValue::Tokens(_) => Err(type_error(RuleKind::Boolean, RuleKind::TokenSet)),
    }
}

pub fn eval_rule_tokens(
    rule: &Rule,
    g: &Graph,
    pre_bound: &Solution,
    owner: &Term,
    opts: RuleEvalOptions,
    trace: &mut RuleTrace,
) -> Result<BTreeSet<Term>, RuleError> {
    match eval_rule(rule, g, pre_bound, owner, opts, trace)? {
        RuleValue::Tokens(t) => Ok(t),
        RuleValue::Bool(_) => Err(type_error(RuleKind::TokenSet, RuleKind::Boolean)),
    }
}

fn type_error(expected: RuleKind, got: RuleKind) -> RuleError {
    RuleError::Type {
        expected: RuleKindMsg(expected),
        got: RuleKindMsg(got),
    }
}

fn eval_inner(
    rule: &Rule,
    g: &Graph,
    bound: &Solution,
    opts: RuleEvalOptions,
    trace: &mut RuleTrace,
) -> Result<RuleValue, RuleError> {
    match rule {
        Rule::Sparql(leaf) => {
            trace.leaf_evals += 1;
            trace.event(TraceEvent::SparqlLeaf);
            match sparql::eval(&leaf.query, g, bound)? {
                QueryResult::Boolean(b) => Ok(RuleValue::Bool(b)),
                result @ QueryResult::Solutions(_) => {
                    let first = leaf
                        .query
                        .projected()
                        .first()
                        .expect("SELECT has at least one projected variable");
                    Ok(RuleValue::Tokens(sparql::select_terms(&result, first)))
                }
            }
        }
        Rule::Constant(term) => {
            trace.leaf_evals += 1;
            trace.event(TraceEvent::ConstantLeaf);
            Ok(match term.as_bool() {
                Some(b) => RuleValue::Bool(b),
                None => RuleValue::Tokens(BTreeSet::from([term.clone()])),
            })
        }
        Rule::Compound { op, subs } => {
            let mut values = Vec::with_capacity(subs.len());
            for sub in subs {
                let v = eval_inner(sub, g, bound, opts, trace)?
                    .as_bool()
                    .ok_or_else(|| type_error(RuleKind::Boolean, RuleKind::TokenSet))?;
                values.push(v);
                if opts.short_circuit {
                    match op {
                        LogicalOp::And if !v => break,
                        LogicalOp::Or if v => break,
                        _ => {}
                    }
                }
            }
            let result = match op {
                LogicalOp::And => values.iter().all(|v| *v),
                LogicalOp::Or => values.iter().any(|v| *v),
                LogicalOp::Xor => values.iter().filter(|v| **v).count() % 2 == 1,
                LogicalOp::Not => !values[0],
            };
            Ok(RuleValue::Bool(result))
        }
        Rule::Condition {
            condition,
            then_rule,
            else_rule,
        } => {
            let c = eval_inner(condition, g, bound, opts, trace)?
                .as_bool()
                .ok_or_else(|| type_error(RuleKind::Boolean, RuleKind::TokenSet))?;
            if c {
                trace.event(TraceEvent::ThenBranch);
                eval_inner(then_rule, g, bound, opts, trace)
            } else {
                trace.event(TraceEvent::ElseBranch);
                eval_inner(else_rule, g, bound, opts, trace)
            }
        }
    }
}

/// Encodes a rule tree as its RDF representation, rooted at a generated
/// blank node. Node labels embed `base` and a zero-padded counter, so
/// sub-rule order survives the canonical (term-ordered) reload.
pub fn rule_to_rdf(rule: &Rule, base: &str) -> (Term, Vec<Triple>) {
    let mut triples = Vec::new();
    let mut counter = 0usize;
    let root = encode(rule, base, &mut counter, &mut triples);
    (root, triples)
}

fn encode(rule: &Rule, base: &str, counter: &mut usize, out: &mut Vec<Triple>) -> Term {
    let node = Term::blank(format!("{base}_{:04}", *counter));
    *counter += 1;
    match rule {
        Rule::Sparql(leaf) => {
            out.push(Triple::new(node.clone(), vocab::rdf_type(), vocab::sparql_rule()));
            out.push(Triple::new(
                node.clone(),
                vocab::has_sparql(),
                Term::literal(leaf.text.clone()),
            ));
        }
        Rule::Constant(value) => {
            out.push(Triple::new(
                node.clone(),
                vocab::rdf_type(),
                vocab::constant_rule(),
            ));
            out.push(Triple::new(node.clone(), vocab::has_value(), value.clone()));
        }
        Rule::Compound { op, subs } => {
            out.push(Triple::new(
                node.clone(),
                vocab::rdf_type(),
                vocab::compound_rule(),
            ));
            out.push(Triple::new(
                node.clone(),
                vocab::operator(),
                Term::literal(op.as_str()),
            ));
            for sub in subs {
                let child = encode(sub, base, counter, out);
                out.push(Triple::new(node.clone(), vocab::sub_rule(), child));
            }
        }
        Rule::Condition {
            condition,
            then_rule,
            else_rule,
        } => {
            out.push(Triple::new(
                node.clone(),
                vocab::rdf_type(),
                vocab::condition_rule(),
            ));
            let c = encode(condition, base, counter, out);
            let t = encode(then_rule, base, counter, out);
            let e = encode(else_rule, base, counter, out);
            out.push(Triple::new(node.clone(), vocab::if_rule(), c));
            out.push(Triple::new(node.clone(), vocab::then_rule(), t));
            out.push(Triple::new(node.clone(), vocab::else_rule(), e));
        }
    }
    node
}

/// Decodes a rule tree rooted at `root`. `seen` spans every root in the
/// model, so both cycles and node sharing are rejected.
pub fn rdf_to_rule(
    g: &Graph,
    root: &Term,
    seen: &mut BTreeSet<Term>,
) -> Result<Rule, ValidationError> {
    if !seen.insert(root.clone()) {
        return Err(ValidationError::new(
            root.clone(),
            "rule node is shared or part of a cycle; rule graphs must be trees",
        ));
    }
    let err = |msg: String| ValidationError::new(root.clone(), msg);

    let types: Vec<&Term> = g.objects(root, &vocab::rdf_type()).collect();
    let class = match types.as_slice() {
        [single] => (*single).clone(),
        [] => return Err(err("rule node has no rdf:type".to_string())),
        _ => return Err(err("rule node has more than one rdf:type".to_string())),
    };

    if class == vocab::sparql_rule() {
        let texts: Vec<&Term> = g.objects(root, &vocab::has_sparql()).collect();
        let [text] = texts.as_slice() else {
            return Err(err(format!(
                "SPARQLRule needs exactly 1 spn:hasSPARQL, found {} (cardinality 1:1)",
                texts.len()
            )));
        };
        let Some(lit) = text.as_literal() else {
            return Err(err("spn:hasSPARQL value must be a string literal".to_string()));
        };
        let leaf = SparqlLeaf::parse(lit.value.clone(), g)
            .map_err(|e| err(format!("bad SPARQL text: {e}")))?;
        return Ok(Rule::Sparql(leaf));
    }

    if class == vocab::constant_rule() {
        let values: Vec<&Term> = g.objects(root, &vocab::has_value()).collect();
        let [value] = values.as_slice() else {
            return Err(err(format!(
                "ConstantRule needs exactly 1 spn:hasValue, found {} (cardinality 1:1)",
                values.len()
            )));
        };
        return Ok(Rule::Constant((*value).clone()));
    }

    if class == vocab::compound_rule() {
        let ops: Vec<&Term> = g.objects(root, &vocab::operator()).collect();
        let [op_term] = ops.as_slice() else {
            return Err(err(format!(
                "CompoundRule needs exactly 1 spn:operator, found {} (cardinality 1:1)",
                ops.len()
            )));
        };
        let op = op_term
            .as_literal()
            .and_then(|l| LogicalOp::parse(&l.value))
            .ok_or_else(|| {
                err(format!(
                    "spn:operator must be one of AND, OR, XOR, NOT; found {op_term}"
                ))
            })?;
        let sub_nodes: Vec<Term> = g.objects(root, &vocab::sub_rule()).cloned().collect();
        if sub_nodes.is_empty() {
            return Err(err("CompoundRule needs at least 1 spn:subRule".to_string()));
        }
        if op == LogicalOp::Not && sub_nodes.len() != 1 {
            return Err(err(format!(
                "NOT rule must have exactly 1 sub-rule, found {}",
                sub_nodes.len()
            )));
        }
        let mut subs = Vec::with_capacity(sub_nodes.len());
        for node in sub_nodes {
            subs.push(rdf_to_rule(g, &node, seen)?);
        }
        return Ok(Rule::Compound { op, subs });
    }

    if class == vocab::condition_rule() {
        let pick = |pred: Term, what: &str| -> Result<Term, ValidationError> {
            let nodes: Vec<&Term> = g.objects(root, &pred).collect();
            match nodes.as_slice() {
                [single] => Ok((*single).clone()),
                other => Err(ValidationError::new(
                    root.clone(),
                    format!(
                        "ConditionRule needs exactly 1 spn:{what}, found {} (cardinality 1:1)",
                        other.len()
                    ),
                )),
            }
        };
        let c = pick(vocab::if_rule(), "if")?;
        let t = pick(vocab::then_rule(), "then")?;
        let e = pick(vocab::else_rule(), "else")?;
        return Ok(Rule::Condition {
            condition: Box::new(rdf_to_rule(g, &c, seen)?),
            then_rule: Box::new(rdf_to_rule(g, &t, seen)?),
            else_rule: Box::new(rdf_to_rule(g, &e, seen)?),
        });
    }

    Err(err(format!("unknown rule class {class}")))
}
