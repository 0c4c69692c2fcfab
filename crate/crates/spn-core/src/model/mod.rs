//! The net vocabulary, model extraction from a graph, and rule-tree
//! evaluation.

mod error;
mod load;
mod rule;
pub mod vocab;

pub use error::{LoadError, ValidationError};
pub use load::{load_model, ArcDef, ArcDirection, ArgDef, PlaceDef, SpnModel, TransitionDef};
pub use rule::{
    eval_rule, eval_rule_bool, eval_rule_tokens, rdf_to_rule, rule_to_rdf, LogicalOp, Rule,
    RuleError, RuleEvalOptions, RuleKind, RuleTrace, RuleValue, SparqlLeaf, TraceEvent, SELF_VAR,
};
