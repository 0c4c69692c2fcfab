//! Semantic Petri-Net engine.
//!
//! Places, transitions and arcs live as RDF triples next to the domain data
//! they talk about. Guards, color rules, init rules and arc expressions are
//! trees of SPARQL-backed rule nodes evaluated against the combined graph, so
//! a transition can ask questions about domain relationships and the current
//! marking in the same query. Tokens are RDF resources held in places through
//! `ldp:contains` triples; firing a transition rewrites those triples.
//!
//! The crate is organized along the pipeline:
//!
//! - [`rdf`]: term model, indexed triple store, Turtle reader/writer.
//! - [`sparql`]: the query subset used by rules, plus its evaluator.
//! - [`model`]: the net vocabulary, model extraction and rule evaluation.
//! - [`runtime`]: binding enumeration, firing, the tick clock, run statistics.
//! - [`unfold`]: conversion to a plain colored net and reachability search.
//! - [`cases`]: generators and drivers for the construction-process and
//!   checking-pipe scenarios.

pub mod cases;
pub mod model;
pub mod rdf;
pub mod runtime;
pub mod sparql;
pub mod unfold;

pub use model::{load_model, LoadError, SpnModel};
pub use rdf::{parse_turtle, serialize_turtle, Graph, Term, Triple};
pub use runtime::{EngineConfig, Runtime, RunStats};
