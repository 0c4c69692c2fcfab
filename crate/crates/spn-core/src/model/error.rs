use std::fmt;

use thiserror::Error;

use crate::rdf::Term;

/// A single model-validation failure, naming the offending node and the
/// violated constraint.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{node}: {message}")]
pub struct ValidationError {
    pub node: Term,
    pub message: String,
}

impl ValidationError {
    pub fn new(node: Term, message: impl Into<String>) -> Self {
        ValidationError {
            node,
            message: message.into(),
        }
    }
}

/// Everything wrong with a model, collected in one pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadError {
    pub errors: Vec<ValidationError>,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model validation failed with {} error(s):", self.errors.len())?;
        for e in &self.errors {
            writeln!(f,"  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for LoadError {}
