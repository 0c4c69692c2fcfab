use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rdf::Term;

/// A position in a triple pattern: a concrete term or a variable.
///
/// Variable names are stored without the leading `?`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PatternTerm {
    Term(Term),
    Var(String),
}

impl PatternTerm {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }
}

/// Predicate position: a single term/variable, or a sequence path of IRI
/// steps (always at least two).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Predicate {
    Single(PatternTerm),
    Path(Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: Predicate,
    pub object: PatternTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Operand {
    Var(String),
    Const(Term),
}

/// Boolean expression tree of a FILTER clause.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FilterExpr {
    Compare(CmpOp, Operand, Operand),
    And(Box<FilterExpr>, Box<FilterExpr>),
    Or(Box<FilterExpr>, Box<FilterExpr>),
    Not(Box<FilterExpr>),
}

impl FilterExpr {
    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            FilterExpr::Compare(_, a, b) => {
                for op in [a, b] {
                    if let Operand::Var(v) = op {
                        out.insert(v.clone());
                    }
                }
            }
            FilterExpr::And(a, b) | FilterExpr::Or(a, b) => {
                a.variables(out);
                b.variables(out);
            }
            FilterExpr::Not(e) => e.variables(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphPattern {
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<FilterExpr>,
}

impl GraphPattern {
    /// Variables occurring in triple patterns (path steps carry none).
    pub fn pattern_variables(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        for p in &self.patterns {
            for pt in [&p.subject, &p.object] {
                if let PatternTerm::Var(v) = pt {
                    vars.insert(v.clone());
                }
            }
            if let Predicate::Single(PatternTerm::Var(v)) = &p.predicate {
                vars.insert(v.clone());
            }
        }
        vars
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryForm {
    Ask,
    Select { distinct: bool, vars: Vec<String> },
}

/// A parsed query in the supported subset: `ASK { ... }` or
/// `SELECT ?v ... [WHERE] { ... }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub form: QueryForm,
    pub pattern: GraphPattern,
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Term(t) => t.fmt(f),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Single(pt) => pt.fmt(f),
            Predicate::Path(steps) => {
                for (i, step) in steps.iter().enumerate() {
                    if i > 0 {
                        f.write_str("/")?;
                    }
                    step.fmt(f)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => write!(f, "?{v}"),
            Operand::Const(t) => t.fmt(f),
        }
    }
}

impl fmt::Display for FilterExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterExpr::Compare(op, a, b) => write!(f, "{a} {op} {b}"),
            FilterExpr::And(a, b) => write!(f, "({a} && {b})"),
            FilterExpr::Or(a, b) => write!(f, "({a} || {b})"),
            FilterExpr::Not(e) => write!(f, "!({e})"),
        }
    }
}

impl fmt::Display for Query {
    /// Renders query text that re-parses to an equal query (IRIs stay
    /// absolute, so no prefix map is needed).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            QueryForm::Ask => f.write_str("ASK {")?,
            QueryForm::Select { distinct, vars } => {
                f.write_str("SELECT ")?;
                if *distinct {
                    f.write_str("DISTINCT ")?;
                }
                for v in vars {
                    write!(f, "?{v} ")?;
                }
                f.write_str("WHERE {")?;
            }
        }
        for p in &self.pattern.patterns {
            write!(f, "\n  {} {} {} .", p.subject, p.predicate, p.object)?;
        }
        for filter in &self.pattern.filters {
            write!(f, "\n  FILTER ({filter})")?;
        }
        f.write_str("\n}")
    }
}

impl Query {
    pub fn is_ask(&self) -> bool {
        matches!(self.form, QueryForm::Ask)
    }

    pub fn projected(&self) -> &[String] {
        match &self.form {
            QueryForm::Ask => &[],
            QueryForm::Select { vars, .. } => vars,
        }
    }
}

/// A set of variable bindings. Each variable maps to exactly one term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Solution {
    bindings: BTreeMap<String, Term>,
}

impl Solution {
    pub fn new() -> Self {
        Solution::default()
    }

    pub fn bind(mut self, var: impl Into<String>, term: Term) -> Self {
        self.bindings.insert(var.into(), term);
        self
    }

    pub fn set(&mut self, var: impl Into<String>, term: Term) {
        self.bindings.insert(var.into(), term);
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.bindings.contains_key(var)
    }

    pub fn remove(&mut self, var: &str) -> Option<Term> {
        self.bindings.remove(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl FromIterator<(String, Term)> for Solution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Solution {
            bindings: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (var, term) in &self.bindings {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "?{var}={term}")?;
            first = false;
        }
        Ok(())
    }
}

/// Outcome of evaluating a query: a boolean for ASK, solutions for SELECT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryResult {
    Boolean(bool),
    Solutions(Vec<Solution>),
}

impl QueryResult {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            QueryResult::Boolean(b) => Some(*b),
            QueryResult::Solutions(_) => None,
        }
    }

    pub fn as_solutions(&self) -> Option<&[Solution]> {
        match self {
            QueryResult::Solutions(s) => Some(s),
            QueryResult::Boolean(_) => None,
        }
    }
}
