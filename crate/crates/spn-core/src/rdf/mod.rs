//! RDF term model, indexed triple store and Turtle I/O.

mod graph;
mod term;
mod turtle;
pub mod vocab;

pub use graph::{Graph, PrefixMap};
pub use term::{Literal, Term, Triple};
pub use turtle::{parse_turtle, serialize_turtle, ParseError};
