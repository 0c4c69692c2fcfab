//! The SPARQL subset behind net rules: ASK/SELECT, basic graph patterns,
//! sequence paths and FILTER, with pre-bound variables from transition
//! bindings.

mod ast;
mod eval;
mod parse;

pub use ast::{
    CmpOp, FilterExpr, GraphPattern, Operand, PatternTerm, Predicate, Query, QueryForm,
    QueryResult, Solution, TriplePattern,
};
pub use eval::{eval, eval_exists_path, select_terms, EvalError};
pub use parse::{parse_sparql, SparqlParseError};

pub(crate) use eval::{expand_paths, substitute, visit_solutions};
