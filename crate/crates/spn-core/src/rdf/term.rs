use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rdf::vocab;

/// An RDF term: IRI, blank node, or literal.
///
/// Equality is structural. The derived ordering (IRIs, then blank nodes,
/// then literals, each by value) is the canonical term order used wherever
/// deterministic output matters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    /// An absolute IRI.
    Iri(String),
    /// A blank node with its label (without the `_:` prefix).
    Blank(String),
    /// A literal. Never carries both a datatype and a language tag.
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub value: String,
    pub datatype: Option<String>,
    pub language: Option<String>,
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Self {
        Term::Iri(value.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank(label.into())
    }

    /// A plain literal without datatype or language.
    pub fn literal(value: impl Into<String>) -> Self {
        Term::Literal(Literal {
            value: value.into(),
            datatype: None,
            language: None,
        })
    }

    pub fn typed_literal(value: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal(Literal {
            value: value.into(),
            datatype: Some(datatype.into()),
            language: None,
        })
    }

    pub fn lang_literal(value: impl Into<String>, language: impl Into<String>) -> Self {
        Term::Literal(Literal {
            value: value.into(),
            datatype: None,
            language: Some(language.into()),
        })
    }

    pub fn boolean(value: bool) -> Self {
        Term::typed_literal(if value { "true" } else { "false" }, vocab::XSD_BOOLEAN)
    }

    pub fn integer(value: i64) -> Self {
        Term::typed_literal(value.to_string(), vocab::XSD_INTEGER)
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    /// Boolean value of an `xsd:boolean` literal, if this is one.
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Term::Literal(l) if l.datatype.as_deref() == Some(vocab::XSD_BOOLEAN) => {
                match l.value.as_str() {
                    "true" | "1" => Some(true),
                    "false" | "0" => Some(false),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Integer value of a numeric literal, if it parses.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Term::Literal(l) if l.is_numeric() => l.value.trim().parse().ok(),
            _ => None,
        }
    }
}

impl Literal {
    /// Whether the datatype is one of the XSD numeric types.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self.datatype.as_deref(),
            Some(
                vocab::XSD_INTEGER
                    | vocab::XSD_DECIMAL
                    | vocab::XSD_DOUBLE
                    | vocab::XSD_FLOAT
                    | vocab::XSD_INT
                    | vocab::XSD_LONG
                    | vocab::XSD_NON_NEGATIVE_INTEGER
            )
        )
    }

    pub fn numeric_value(&self) -> Option<f64> {
        if self.is_numeric() {
            self.value.trim().parse().ok()
        } else {
            None
        }
    }
}

impl fmt::Display for Term {
    /// N-Triples-style rendering, used in diagnostics and canonical keys.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(v) => write!(f, "<{v}>"),
            Term::Blank(l) => write!(f, "_:{l}"),
            Term::Literal(l) => {
                write!(f, "\"{}\"", escape_literal(&l.value))?;
                if let Some(dt) = &l.datatype {
                    write!(f, "^^<{dt}>")?;
                } else if let Some(lang) = &l.language {
                    write!(f, "@{lang}")?;
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out
}

/// An RDF statement. The predicate is always an IRI and literals never
/// appear in subject position; the parser and loaders preserve this.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        debug_assert!(predicate.is_iri(), "predicate must be an IRI");
        debug_assert!(!subject.is_literal(), "subject must not be a literal");
        Triple {
            subject,
            predicate,
            object,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
