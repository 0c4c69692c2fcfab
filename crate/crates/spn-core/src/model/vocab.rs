//! Net structure and rule vocabulary terms.

use crate::rdf::{vocab, Term};

fn spn(local: &str) -> Term {
    Term::iri(format!("{}{local}", vocab::SPN_NS))
}

pub fn transition() -> Term {
    spn("Transition")
}

pub fn place() -> Term {
    spn("Place")
}

pub fn arc() -> Term {
    spn("Arc")
}

pub fn arc_p2t() -> Term {
    spn("ArcP2T")
}

pub fn arc_t2p() -> Term {
    spn("ArcT2P")
}

pub fn guard_rule() -> Term {
    spn("guardRule")
}

pub fn color_rule() -> Term {
    spn("colorRule")
}

pub fn init_rule() -> Term {
    spn("initRule")
}

pub fn has_arg() -> Term {
    spn("hasArg")
}

pub fn rel_place() -> Term {
    spn("relPlace")
}

pub fn rel_transition() -> Term {
    spn("relTransition")
}

pub fn arc_expr() -> Term {
    spn("arcExpr")
}

pub fn sparql_rule() -> Term {
    spn("SPARQLRule")
}

pub fn has_sparql() -> Term {
    spn("hasSPARQL")
}

pub fn constant_rule() -> Term {
    spn("ConstantRule")
}

pub fn has_value() -> Term {
    spn("hasValue")
}

pub fn compound_rule() -> Term {
    spn("CompoundRule")
}

pub fn operator() -> Term {
    spn("operator")
}

pub fn sub_rule() -> Term {
    spn("subRule")
}

pub fn condition_rule() -> Term {
    spn("ConditionRule")
}

pub fn if_rule() -> Term {
    spn("if")
}

pub fn then_rule() -> Term {
    spn("then")
}

pub fn else_rule() -> Term {
    spn("else")
}

pub fn arg_def() -> Term {
    spn("ArgDef")
}

pub fn arg_name() -> Term {
    spn("argName")
}

pub fn arg_type() -> Term {
    spn("argType")
}

pub fn rdf_type() -> Term {
    Term::iri(vocab::RDF_TYPE)
}

pub fn ldp_contains() -> Term {
    Term::iri(vocab::LDP_CONTAINS)
}

fn spnx(local: &str) -> Term {
    Term::iri(format!("{}{local}", vocab::SPNX_NS))
}

/// Engine-constraint annotations in the reserved extension namespace.
pub fn max_tokens() -> Term {
    spnx("maxTokens")
}

pub fn max_fires_per_tick() -> Term {
    spnx("maxFiresPerTick")
}

pub fn min_ticks_between_moves() -> Term {
    spnx("minTicksBetweenMoves")
}

/// Runtime bookkeeping: the clock node and its tick value, readable from
/// rules like any other triple.
pub fn clock_node() -> Term {
    spnx("clock")
}

pub fn tick() -> Term {
    spnx("tick")
}

pub fn last_move_tick() -> Term {
    spnx("lastMoveTick")
}

/// Marks arcs generated by connection explication; the runtime ignores
/// them for binding and firing purposes.
pub fn read_arc() -> Term {
    spnx("readArc")
}
