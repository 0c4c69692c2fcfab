//! Turtle reader and writer for the subset the engine uses.
//!
//! Supported: `@prefix`/`@base`, prefixed names, absolute IRIs, string
//! literals (with `^^datatype` or `@lang`), the `a` keyword, object lists
//! (`,`), predicate-object lists (`;`) and labelled blank nodes (`_:x`).
//! Collections, anonymous blank nodes, quoted triples and bare
//! numeric/boolean abbreviations are rejected with a parse error. Quoted
//! strings may contain raw newlines, so query text printed across several
//! lines loads as written.

use std::fmt::Write as _;

use thiserror::Error;

use crate::rdf::graph::{Graph, PrefixMap};
use crate::rdf::term::{escape_literal, Literal, Term, Triple};
use crate::rdf::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("turtle parse error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses a Turtle document into a graph seeded with the bundled prefixes.
///
/// `base` is used to resolve relative IRIs; without it a relative IRI is an
/// error. Blank-node labels are kept as written, so repeated parses of the
/// same document produce identical graphs.
pub fn parse_turtle(text: &str, base: Option<&str>) -> Result<Graph, ParseError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        base: base.map(str::to_string),
        graph: Graph::new(),
    };
    parser.parse_document()?;
    Ok(parser.graph)
}

/// Serializes a graph so that re-parsing yields the same triple set.
pub fn serialize_turtle(g: &Graph) -> String {
    let mut out = String::new();
    for (short, iri) in g.prefixes().iter() {
        let _ = writeln!(out, "@prefix {short}: <{iri}> .");
    }
    if g.is_empty() {
        return out;
    }
    out.push('\n');

    // Group by subject; within a subject, rdf:type prints first as `a`.
    let mut current: Option<&Term> = None;
    let mut grouped: Vec<(&Term, Vec<(&Term, &Term)>)> = Vec::new();
    for t in g.iter() {
        if current != Some(&t.subject) {
            grouped.push((&t.subject, Vec::new()));
            current = Some(&t.subject);
        }
        grouped
            .last_mut()
            .expect("group exists")
            .1
            .push((&t.predicate, &t.object));
    }

    for (subject, mut pos) in grouped {
        let rdf_type = Term::iri(vocab::RDF_TYPE);
        pos.sort_by_key(|(p, o)| (*p != &rdf_type, *p, *o));
        let _ = write!(out, "{} ", render_term(subject, g.prefixes()));
        let mut last_pred: Option<&Term> = None;
        for (i, (p, o)) in pos.iter().enumerate() {
            if last_pred == Some(*p) {
                let _ = write!(out, ", {}", render_term(o, g.prefixes()));
            } else {
                if i > 0 {
                    let _ = write!(out, " ;\n    ");
                }
                let pred = if **p == rdf_type {
                    "a".to_string()
                } else {
                    render_term(p, g.prefixes())
                };
                let _ = write!(out, "{} {}", pred, render_term(o, g.prefixes()));
                last_pred = Some(*p);
            }
        }
        out.push_str(" .\n");
    }
    out
}

fn render_term(t: &Term, prefixes: &PrefixMap) -> String {
    match t {
        Term::Iri(iri) => match prefixes.shrink(iri) {
            Some((short, local)) => format!("{short}:{local}"),
            None => format!("<{iri}>"),
        },
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal(l) => {
            let mut s = format!("\"{}\"", escape_literal(&l.value));
            if let Some(dt) = &l.datatype {
                let rendered = match prefixes.shrink(dt) {
                    Some((short, local)) => format!("{short}:{local}"),
                    None => format!("<{dt}>"),
                };
                let _ = write!(s, "^^{rendered}");
            } else if let Some(lang) = &l.language {
                let _ = write!(s, "@{lang}");
            }
            s
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    base: Option<String>,
    graph: Graph,
}

impl Parser {
    fn parse_document(&mut self) -> Result<(), ParseError> {
        loop {
            self.skip_ws();
            if self.at_end() {
                return Ok(());
            }
            if self.peek_str("@prefix") {
                self.parse_prefix_directive()?;
            } else if self.peek_str("@base") {
                self.parse_base_directive()?;
            } else {
                self.parse_statement()?;
            }
        }
    }

    fn parse_prefix_directive(&mut self) -> Result<(), ParseError> {
        self.expect_str("@prefix")?;
        self.skip_ws();
        let short = self.parse_prefix_label()?;
        self.skip_ws();
        let iri = self.parse_iri_ref()?;
        self.skip_ws();
        self.expect_char('.')?;
        self.graph.prefixes_mut().insert(short, iri);
        Ok(())
    }

    fn parse_base_directive(&mut self) -> Result<(), ParseError> {
        self.expect_str("@base")?;
        self.skip_ws();
        let iri = self.parse_iri_ref()?;
        self.skip_ws();
        self.expect_char('.')?;
        self.base = Some(iri);
        Ok(())
    }

    /// subject predicate-object list, with `;` and `,` abbreviations.
    fn parse_statement(&mut self) -> Result<(), ParseError> {
        let subject = self.parse_subject()?;
        loop {
            self.skip_ws();
            let predicate = self.parse_predicate()?;
            loop {
                self.skip_ws();
                let object = self.parse_object()?;
                self.graph
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.advance();
                } else {
                    break;
                }
            }
            match self.peek() {
                Some(';') => {
                    self.advance();
                    self.skip_ws();
                    // A dangling `;` before `.` is allowed.
                    if self.peek() == Some('.') {
                        self.advance();
                        return Ok(());
                    }
                }
                Some('.') => {
                    self.advance();
                    return Ok(());
                }
                other => {
                    return Err(self.error(format!(
                        "expected ';', ',' or '.' after object, found {}",
                        describe(other)
                    )))
                }
            }
        }
    }

    fn parse_subject(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.parse_iri_resolved()?)),
            Some('_') => self.parse_blank_node(),
            Some('[') => Err(self.error("anonymous blank nodes are not supported".into())),
            Some('(') => Err(self.error("collections are not supported".into())),
            Some(c) if is_pname_start(c) => Ok(Term::Iri(self.parse_prefixed_name()?)),
            other => Err(self.error(format!("expected subject, found {}", describe(other)))),
        }
    }

    fn parse_predicate(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some('a') && !is_pname_continue(self.peek_at(1)) {
            self.advance();
            return Ok(Term::iri(vocab::RDF_TYPE));
        }
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.parse_iri_resolved()?)),
            Some(c) if is_pname_start(c) => Ok(Term::Iri(self.parse_prefixed_name()?)),
            other => Err(self.error(format!("expected predicate, found {}", describe(other)))),
        }
    }

    fn parse_object(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('<') => {
                if self.peek_str("<<") {
                    return Err(self.error("quoted triples are not supported".into()));
                }
                Ok(Term::Iri(self.parse_iri_resolved()?))
            }
            Some('_') => self.parse_blank_node(),
            Some('"') | Some('\'') => self.parse_literal(),
            Some('[') => Err(self.error("anonymous blank nodes are not supported".into())),
            Some('(') => Err(self.error("collections are not supported".into())),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => Err(self.error(
                "bare numeric literals are not supported; use \"...\"^^xsd:integer".into(),
            )),
            Some(c) if is_pname_start(c) => {
                let name = self.parse_prefixed_name()?;
                Ok(Term::Iri(name))
            }
            other => Err(self.error(format!("expected object, found {}", describe(other)))),
        }
    }

    fn parse_blank_node(&mut self) -> Result<Term, ParseError> {
        self.expect_char('_')?;
        self.expect_char(':')?;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                self.advance();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.error("empty blank node label".into()));
        }
        let label: String = self.chars[start..self.pos].iter().collect();
        Ok(Term::Blank(label))
    }

    fn parse_literal(&mut self) -> Result<Term, ParseError> {
        let value = self.parse_string()?;
        if self.peek_str("^^") {
            self.advance();
            self.advance();
            let datatype = match self.peek() {
                Some('<') => self.parse_iri_resolved()?,
                Some(c) if is_pname_start(c) => self.parse_prefixed_name()?,
                other => {
                    return Err(
                        self.error(format!("expected datatype IRI, found {}", describe(other)))
                    )
                }
            };
            return Ok(Term::Literal(Literal {
                value,
                datatype: Some(datatype),
                language: None,
            }));
        }
        if self.peek() == Some('@') {
            self.advance();
            let start = self.pos;
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    self.advance();
                } else {
                    break;
                }
            }
            if self.pos == start {
                return Err(self.error("empty language tag".into()));
            }
            let language: String = self.chars[start..self.pos].iter().collect();
            return Ok(Term::Literal(Literal {
                value,
                datatype: None,
                language: Some(language),
            }));
        }
        Ok(Term::literal(value))
    }

    /// Quoted string, long (`"""`) or short. Short strings may contain raw
    /// newlines: printed listings embed multi-line query text directly.
    fn parse_string(&mut self) -> Result<String, ParseError> {
        let quote = self.peek().expect("caller checked quote");
        self.advance();
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.advance();
            self.advance();
        } else if self.peek() == Some(quote) {
            // Empty short string.
            self.advance();
            return Ok(String::new());
        }
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated string literal".into())),
                Some('\\') => {
                    self.advance();
                    let escaped = self
                        .peek()
                        .ok_or_else(|| self.error("unterminated escape".into()))?;
                    let replacement = match escaped {
                        't' => '\t',
                        'n' => '\n',
                        'r' => '\r',
                        '"' => '"',
                        '\'' => '\'',
                        '\\' => '\\',
                        'u' | 'U' => {
                            let len = if escaped == 'u' { 4 } else { 8 };
                            self.advance();
                            let mut code = 0u32;
                            for _ in 0..len {
                                let d = self
                                    .peek()
                                    .and_then(|c| c.to_digit(16))
                                    .ok_or_else(|| self.error("bad unicode escape".into()))?;
                                code = code * 16 + d;
                                self.advance();
                            }
                            value.push(
                                char::from_u32(code)
                                    .ok_or_else(|| self.error("invalid code point".into()))?,
                            );
                            continue;
                        }
                        other => {
                            return Err(self.error(format!("unknown escape '\\{other}'")));
                        }
                    };
                    value.push(replacement);
                    self.advance();
                }
                Some(c) if c == quote => {
                    if long {
                        if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                            self.advance();
                            self.advance();
                            self.advance();
                            return Ok(value);
                        }
                        value.push(c);
                        self.advance();
                    } else {
                        self.advance();
                        return Ok(value);
                    }
                }
                Some(c) => {
                    value.push(c);
                    self.advance();
                }
            }
        }
    }

    fn parse_iri_ref(&mut self) -> Result<String, ParseError> {
        self.expect_char('<')?;
        let mut iri = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated IRI".into())),
                Some('>') => {
                    self.advance();
                    return Ok(iri);
                }
                Some(c) if c == ' ' || c == '\n' || c == '<' || c == '"' => {
                    return Err(self.error(format!("invalid character '{c}' in IRI")));
                }
                Some(c) => {
                    iri.push(c);
                    self.advance();
                }
            }
        }
    }

    fn parse_iri_resolved(&mut self) -> Result<String, ParseError> {
        let iri = self.parse_iri_ref()?;
        self.resolve_iri(iri)
    }

    fn resolve_iri(&self, iri: String) -> Result<String, ParseError> {
        if is_absolute_iri(&iri) {
            return Ok(iri);
        }
        match &self.base {
            Some(base) => Ok(join_base(base, &iri)),
            None => Err(self.error(format!("relative IRI <{iri}> without a base"))),
        }
    }

    fn parse_prefix_label(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if is_pname_continue(Some(c)) {
                self.advance();
            } else {
                break;
            }
        }
        let label: String = self.chars[start..self.pos].iter().collect();
        self.expect_char(':')?;
        Ok(label)
    }

    fn parse_prefixed_name(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if is_pname_continue(Some(c)) {
                self.advance();
            } else {
                break;
            }
        }
        let short: String = self.chars[start..self.pos].iter().collect();
        self.expect_char(':')?;
        let local_start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || matches!(c, '_' | '-') {
                self.advance();
            } else if c == '.' && is_pname_continue(self.peek_at(1)) {
                // A dot is part of the local name only when followed by more
                // name characters; otherwise it terminates the statement.
                self.advance();
            } else {
                break;
            }
        }
        let local: String = self.chars[local_start..self.pos].iter().collect();
        self.graph
            .prefixes()
            .expand(&short, &local)
            .ok_or_else(|| self.error(format!("unknown prefix '{short}:'")))
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.advance();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.advance();
                    }
                }
                _ => return,
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn peek_str(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn advance(&mut self) {
        if let Some(c) = self.peek() {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
            self.pos += 1;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn expect_char(&mut self, expected: char) -> Result<(), ParseError> {
        if self.peek() == Some(expected) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected '{expected}', found {}",
                describe(self.peek())
            )))
        }
    }

    fn expect_str(&mut self, expected: &str) -> Result<(), ParseError> {
        for c in expected.chars() {
            self.expect_char(c)?;
        }
        Ok(())
    }

    fn error(&self, message: String) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message,
        }
    }
}

fn describe(c: Option<char>) -> String {
    match c {
        Some(c) => format!("'{c}'"),
        None => "end of input".to_string(),
    }
}

fn is_pname_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_pname_continue(c: Option<char>) -> bool {
    matches!(c, Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn is_absolute_iri(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else {
        return false;
    };
    let scheme = &iri[..colon];
    !scheme.is_empty()
        && scheme
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

fn join_base(base: &str, rel: &str) -> String {
    if let Some(frag) = rel.strip_prefix('#') {
        let stem = base.split('#').next().unwrap_or(base);
        return format!("{stem}#{frag}");
    }
    if base.ends_with('/') || base.ends_with('#') {
        format!("{base}{rel}")
    } else {
        format!("{base}/{rel}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let g = parse_turtle("@prefix ex: <http://e/>. ex:s ex:p ex:o.", None).unwrap();
        assert_eq!(g.len(), 1);
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, Term::iri("http://e/s"));
        assert_eq!(t.predicate, Term::iri("http://e/p"));
        assert_eq!(t.object, Term::iri("http://e/o"));
    }

    #[test]
    fn object_list_shares_subject_and_predicate() {
        let g = parse_turtle("@prefix ex: <http://e/>. ex:s ex:p \"x\", \"y\".", None).unwrap();
        assert_eq!(g.len(), 2);
        for t in g.iter() {
            assert_eq!(t.subject, Term::iri("http://e/s"));
            assert_eq!(t.predicate, Term::iri("http://e/p"));
        }
    }

    #[test]
    fn predicate_object_list() {
        let g = parse_turtle(
            "@prefix ex: <http://e/>. ex:s a ex:C ; ex:p ex:o ; ex:q \"v\"@en .",
            None,
        )
        .unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.contains(&Triple::new(
            Term::iri("http://e/s"),
            Term::iri(vocab::RDF_TYPE),
            Term::iri("http://e/C"),
        )));
    }

    #[test]
    fn multi_line_string_keeps_newlines() {
        let doc = "@prefix ex: <http://e/>.\nex:s ex:p \"ASK {\n  ?s ?p ?o.\n}\".";
        let g = parse_turtle(doc, None).unwrap();
        let t = g.iter().next().unwrap();
        let lit = t.object.as_literal().unwrap();
        assert!(lit.value.contains('\n'));
        assert!(lit.value.starts_with("ASK {"));
    }

    #[test]
    fn bundled_prefixes_need_no_declaration() {
        let g = parse_turtle("proj:t a spn:Transition.", None).unwrap();
        assert_eq!(g.len(), 1);
        let t = g.iter().next().unwrap();
        assert_eq!(t.object, Term::iri("http://example.org/spn#Transition"));
    }

    #[test]
    fn typed_and_tagged_literals() {
        let g = parse_turtle(
            "@prefix ex: <http://e/>. ex:s ex:p \"5\"^^xsd:integer ; ex:q \"hi\"@en .",
            None,
        )
        .unwrap();
        let mut objects: Vec<_> = g.iter().map(|t| t.object.clone()).collect();
        objects.sort();
        assert!(objects.contains(&Term::typed_literal("5", vocab::XSD_INTEGER)));
        assert!(objects.contains(&Term::lang_literal("hi", "en")));
    }

    #[test]
    fn blank_node_labels_preserved() {
        let g = parse_turtle("@prefix ex: <http://e/>. _:b0 ex:p _:b1.", None).unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, Term::blank("b0"));
        assert_eq!(t.object, Term::blank("b1"));
    }

    #[test]
    fn collections_are_a_parse_error() {
        let err = parse_turtle("@prefix ex: <http://e/>. ex:s ex:p (1 2).", None).unwrap_err();
        assert!(err.message.contains("collections"));
    }

    #[test]
    fn quoted_triples_are_a_parse_error() {
        let err =
            parse_turtle("@prefix ex: <http://e/>. ex:s ex:p << ex:a ex:b ex:c >>.", None)
                .unwrap_err();
        assert!(err.message.contains("quoted triples"));
    }

    #[test]
    fn bare_numbers_are_a_parse_error() {
        let err = parse_turtle("@prefix ex: <http://e/>. ex:s ex:p 42.", None).unwrap_err();
        assert!(err.message.contains("numeric"));
    }

    #[test]
    fn unknown_prefix_is_reported_with_position() {
        let err = parse_turtle("nope:s nope:p nope:o.", None).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("unknown prefix"));
    }

    #[test]
    fn relative_iri_resolves_against_base() {
        let g = parse_turtle("<s> <p> <o>.", Some("http://e/m")).unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, Term::iri("http://e/m/s"));
    }

    #[test]
    fn relative_iri_without_base_is_an_error() {
        assert!(parse_turtle("<s> <p> <o>.", None).is_err());
    }

    #[test]
    fn empty_graph_serializes_to_prefixes_only() {
        let g = Graph::new();
        let doc = serialize_turtle(&g);
        assert!(doc.contains("@prefix spn:"));
        let back = parse_turtle(&doc, None).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn round_trip_single_triple() {
        let g = parse_turtle("@prefix ex: <http://e/>. ex:s ex:p \"x\\ny\".", None).unwrap();
        let back = parse_turtle(&serialize_turtle(&g), None).unwrap();
        assert!(g.same_triples(&back));
    }

    #[test]
    fn dangling_semicolon_before_dot() {
        let g = parse_turtle("@prefix ex: <http://e/>. ex:s ex:p ex:o ; .", None).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn long_strings_supported() {
        let g = parse_turtle(
            "@prefix ex: <http://e/>. ex:s ex:p \"\"\"has \"quotes\" inside\"\"\".",
            None,
        )
        .unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.object.as_literal().unwrap().value, "has \"quotes\" inside");
    }
}
