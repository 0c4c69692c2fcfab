//! Parser for the query subset used by net rules.
//!
//! Grammar: `ASK { ... }` and `SELECT [DISTINCT] ?v... [WHERE] { ... }`;
//! triple patterns with `a`, `;`, `,`; sequence property paths `p1/p2/...`;
//! `FILTER` with comparisons and `&&`, `||`, `!`; string, numeric and
//! boolean literals; prefixed names resolved against the supplied prefix
//! map. Anything outside the subset is a parse error.

use thiserror::Error;

use crate::rdf::{vocab, PrefixMap, Term};
use crate::sparql::ast::{
    CmpOp, FilterExpr, GraphPattern, Operand, PatternTerm, Predicate, Query, QueryForm,
    TriplePattern,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparqlParseError {
    #[error("sparql parse error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown prefix '{prefix}:' at {line}:{column}")]
    UnknownPrefix {
        prefix: String,
        line: usize,
        column: usize,
    },
}

pub fn parse_sparql(text: &str, prefixes: &PrefixMap) -> Result<Query, SparqlParseError> {
    let tokens = scan(text, prefixes)?;
    let mut parser = QueryParser { tokens, pos: 0 };
    let query = parser.parse_query()?;
    parser.expect_eof()?;
    validate(query)
}

fn validate(query: Query) -> Result<Query, SparqlParseError> {
    if let QueryForm::Select { vars, .. } = &query.form {
        let pattern_vars = query.pattern.pattern_variables();
        for v in vars {
            if !pattern_vars.contains(v) {
                return Err(SparqlParseError::Syntax {
                    line: 0,
                    column: 0,
                    message: format!("projected variable ?{v} does not occur in the pattern"),
                });
            }
        }
    }
    Ok(query)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBrace,
    RBrace,
    LParen,
    RParen,
    Dot,
    Semicolon,
    Comma,
    Slash,
    AndAnd,
    OrOr,
    Bang,
    Cmp(CmpOp),
    Var(String),
    Iri(String),
    Literal(Term),
    A,
    Ask,
    Select,
    Where,
    Distinct,
    Filter,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Scanner<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    prefixes: &'a PrefixMap,
}

fn scan(text: &str, prefixes: &PrefixMap) -> Result<Vec<Spanned>, SparqlParseError> {
    let mut s = Scanner {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        prefixes,
    };
    let mut out = Vec::new();
    loop {
        s.skip_ws();
        let (line, column) = (s.line, s.column);
        let Some(c) = s.peek() else {
            out.push(Spanned {
                tok: Tok::Eof,
                line,
                column,
            });
            return Ok(out);
        };
        let tok = match c {
            '{' => s.single(Tok::LBrace),
            '}' => s.single(Tok::RBrace),
            '(' => s.single(Tok::LParen),
            ')' => s.single(Tok::RParen),
            '.' => s.single(Tok::Dot),
            ';' => s.single(Tok::Semicolon),
            ',' => s.single(Tok::Comma),
            '/' => s.single(Tok::Slash),
            '&' => {
                s.advance();
                s.expect('&')?;
                Tok::AndAnd
            }
            '|' => {
                s.advance();
                s.expect('|')?;
                Tok::OrOr
            }
            '!' => {
                s.advance();
                if s.peek() == Some('=') {
                    s.advance();
                    Tok::Cmp(CmpOp::Ne)
                } else {
                    Tok::Bang
                }
            }
            '=' => s.single(Tok::Cmp(CmpOp::Eq)),
            '<' => {
                // Either an IRI reference or a comparison operator.
                if s.peek_at(1).is_some_and(is_iri_char) {
                    let iri = s.scan_iri_ref()?;
                    Tok::Iri(iri)
                } else {
                    s.advance();
                    if s.peek() == Some('=') {
                        s.advance();
                        Tok::Cmp(CmpOp::Le)
                    } else {
                        Tok::Cmp(CmpOp::Lt)
                    }
                }
            }
            '>' => {
                s.advance();
                if s.peek() == Some('=') {
                    s.advance();
                    Tok::Cmp(CmpOp::Ge)
                } else {
                    Tok::Cmp(CmpOp::Gt)
                }
            }
            '?' | '$' => {
                s.advance();
                let name = s.scan_name();
                if name.is_empty() {
                    return Err(s.err("empty variable name"));
                }
                Tok::Var(name)
            }
            '"' | '\'' => {
                let value = s.scan_string(c)?;
                s.scan_literal_suffix(value)?
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => s.scan_number()?,
            c if c.is_ascii_alphabetic() || c == '_' => s.scan_word()?,
            other => return Err(s.err(format!("unexpected character '{other}'"))),
        };
        out.push(Spanned { tok, line, column });
    }
}

fn is_iri_char(c: char) -> bool {
    // Inside `<...>` of a query we only ever see absolute IRIs.
    c.is_ascii_alphanumeric() || matches!(c, ':' | '/' | '#' | '.' | '-' | '_' | '~' | '%')
}

impl Scanner<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
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

    fn single(&mut self, tok: Tok) -> Tok {
        self.advance();
        tok
    }

    fn expect(&mut self, c: char) -> Result<(), SparqlParseError> {
        if self.peek() == Some(c) {
            self.advance();
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => self.advance(),
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

    fn scan_name(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.advance();
            } else {
                break;
            }
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn scan_iri_ref(&mut self) -> Result<String, SparqlParseError> {
        self.expect('<')?;
        let mut iri = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated IRI")),
                Some('>') => {
                    self.advance();
                    return Ok(iri);
                }
                Some(c) if c.is_whitespace() => {
                    return Err(self.err("whitespace inside IRI"));
                }
                Some(c) => {
                    iri.push(c);
                    self.advance();
                }
            }
        }
    }

    fn scan_string(&mut self, quote: char) -> Result<String, SparqlParseError> {
        self.advance();
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated string")),
                Some('\\') => {
                    self.advance();
                    let c = self.peek().ok_or_else(|| self.err("unterminated escape"))?;
                    let replacement = match c {
                        't' => '\t',
                        'n' => '\n',
                        'r' => '\r',
                        '\\' => '\\',
                        '"' => '"',
                        '\'' => '\'',
                        other => return Err(self.err(format!("unknown escape '\\{other}'"))),
                    };
                    value.push(replacement);
                    self.advance();
                }
                Some(c) if c == quote => {
                    self.advance();
                    return Ok(value);
                }
                Some(c) => {
                    value.push(c);
                    self.advance();
                }
            }
        }
    }

    fn scan_literal_suffix(&mut self, value: String) -> Result<Tok, SparqlParseError> {
        if self.peek() == Some('^') && self.peek_at(1) == Some('^') {
            self.advance();
            self.advance();
            let datatype = if self.peek() == Some('<') {
                self.scan_iri_ref()?
            } else {
                self.scan_prefixed_name()?
            };
            return Ok(Tok::Literal(Term::typed_literal(value, datatype)));
        }
        if self.peek() == Some('@') {
            self.advance();
            let tag = self.scan_name();
            if tag.is_empty() {
                return Err(self.err("empty language tag"));
            }
            return Ok(Tok::Literal(Term::lang_literal(value, tag)));
        }
        Ok(Tok::Literal(Term::literal(value)))
    }

    fn scan_number(&mut self) -> Result<Tok, SparqlParseError> {
        let start = self.pos;
        if matches!(self.peek(), Some('+') | Some('-')) {
            self.advance();
        }
        let mut decimal = false;
        let mut digits = 0;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits += 1;
                self.advance();
            } else if c == '.' && !decimal && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())
            {
                decimal = true;
                self.advance();
            } else {
                break;
            }
        }
        if digits == 0 {
            return Err(self.err("expected digits"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let datatype = if decimal {
            vocab::XSD_DECIMAL
        } else {
            vocab::XSD_INTEGER
        };
        Ok(Tok::Literal(Term::typed_literal(text, datatype)))
    }

    fn scan_word(&mut self) -> Result<Tok, SparqlParseError> {
        let word = self.scan_name();
        if self.peek() == Some(':') {
            self.advance();
            let local = self.scan_local_name();
            return match self.prefixes.expand(&word, &local) {
                Some(iri) => Ok(Tok::Iri(iri)),
                None => Err(SparqlParseError::UnknownPrefix {
                    prefix: word,
                    line: self.line,
                    column: self.column,
                }),
            };
        }
        match word.to_ascii_uppercase().as_str() {
            "ASK" => Ok(Tok::Ask),
            "SELECT" => Ok(Tok::Select),
            "WHERE" => Ok(Tok::Where),
            "DISTINCT" => Ok(Tok::Distinct),
            "FILTER" => Ok(Tok::Filter),
            _ if word == "a" => Ok(Tok::A),
            _ if word == "true" => Ok(Tok::Literal(Term::boolean(true))),
            _ if word == "false" => Ok(Tok::Literal(Term::boolean(false))),
            _ => Err(self.err(format!("unexpected word '{word}'"))),
        }
    }

    fn scan_prefixed_name(&mut self) -> Result<String, SparqlParseError> {
        let short = self.scan_name();
        self.expect(':')?;
        let local = self.scan_local_name();
        self.prefixes
            .expand(&short, &local)
            .ok_or_else(|| SparqlParseError::UnknownPrefix {
                prefix: short,
                line: self.line,
                column: self.column,
            })
    }

    fn scan_local_name(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                self.advance();
            } else if c == '.'
                && self
                    .peek_at(1)
                    .is_some_and(|d| d.is_ascii_alphanumeric() || d == '_')
            {
                self.advance();
            } else {
                break;
            }
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn err(&self, message: impl Into<String>) -> SparqlParseError {
        SparqlParseError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

struct QueryParser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl QueryParser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos.min(self.tokens.len() - 1)].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SparqlParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(SparqlParseError::Syntax {
                line: t.line,
                column: t.column,
                message: format!("expected {what}"),
            })
        }
    }

    fn expect_eof(&mut self) -> Result<(), SparqlParseError> {
        let t = self.next();
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            Err(SparqlParseError::Syntax {
                line: t.line,
                column: t.column,
                message: "unexpected input after query".to_string(),
            })
        }
    }

    fn err_here(&self, message: impl Into<String>) -> SparqlParseError {
        let t = &self.tokens[self.pos.min(self.tokens.len() - 1)];
        SparqlParseError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn parse_query(&mut self) -> Result<Query, SparqlParseError> {
        match self.next().tok {
            Tok::Ask => {
                let pattern = self.parse_group()?;
                Ok(Query {
                    form: QueryForm::Ask,
                    pattern,
                })
            }
            Tok::Select => {
                let distinct = self.eat(&Tok::Distinct);
                let mut vars = Vec::new();
                while let Tok::Var(_) = self.peek() {
                    if let Tok::Var(name) = self.next().tok {
                        vars.push(name);
                    }
                }
                if vars.is_empty() {
                    return Err(self.err_here("SELECT needs at least one projected variable"));
                }
                self.eat(&Tok::Where);
                let pattern = self.parse_group()?;
                Ok(Query {
                    form: QueryForm::Select { distinct, vars },
                    pattern,
                })
            }
            _ => Err(self.err_here("query must start with ASK or SELECT")),
        }
    }

    fn parse_group(&mut self) -> Result<GraphPattern, SparqlParseError> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut group = GraphPattern::default();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.next();
                    return Ok(group);
                }
                Tok::Filter => {
                    self.next();
                    self.expect(Tok::LParen, "'(' after FILTER")?;
                    let expr = self.parse_or_expr()?;
                    self.expect(Tok::RParen, "')' closing FILTER")?;
                    self.eat(&Tok::Dot);
                    group.filters.push(expr);
                }
                Tok::Eof => return Err(self.err_here("unterminated group pattern")),
                _ => {
                    self.parse_triples(&mut group)?;
                    self.eat(&Tok::Dot);
                }
            }
        }
    }

    fn parse_triples(&mut self, group: &mut GraphPattern) -> Result<(), SparqlParseError> {
        let subject = self.parse_term("subject")?;
        loop {
            let predicate = self.parse_predicate()?;
            loop {
                let object = self.parse_term("object")?;
                group.patterns.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            if !self.eat(&Tok::Semicolon) {
                return Ok(());
            }
            // A dangling `;` before `.` or `}` ends the block.
            if matches!(self.peek(), Tok::Dot | Tok::RBrace) {
                return Ok(());
            }
        }
    }

    fn parse_predicate(&mut self) -> Result<Predicate, SparqlParseError> {
        match self.peek().clone() {
            Tok::A => {
                self.next();
                Ok(Predicate::Single(PatternTerm::Term(Term::iri(
                    vocab::RDF_TYPE,
                ))))
            }
            Tok::Var(name) => {
                self.next();
                Ok(Predicate::Single(PatternTerm::Var(name)))
            }
            Tok::Iri(first) => {
                self.next();
                if self.peek() != &Tok::Slash {
                    return Ok(Predicate::Single(PatternTerm::Term(Term::Iri(first))));
                }
                let mut steps = vec![Term::Iri(first)];
                while self.eat(&Tok::Slash) {
                    match self.next().tok {
                        Tok::Iri(step) => steps.push(Term::Iri(step)),
                        _ => return Err(self.err_here("sequence path step must be an IRI")),
                    }
                }
                Ok(Predicate::Path(steps))
            }
            _ => Err(self.err_here("expected predicate")),
        }
    }

    fn parse_term(&mut self, what: &str) -> Result<PatternTerm, SparqlParseError> {
        match self.next().tok {
            Tok::Var(name) => Ok(PatternTerm::Var(name)),
            Tok::Iri(iri) => Ok(PatternTerm::Term(Term::Iri(iri))),
            Tok::Literal(term) => Ok(PatternTerm::Term(term)),
            _ => Err(self.err_here(format!("expected {what}"))),
        }
    }

    fn parse_or_expr(&mut self) -> Result<FilterExpr, SparqlParseError> {
        let mut left = self.parse_and_expr()?;
        while self.eat(&Tok::OrOr) {
            let right = self.parse_and_expr()?;
            left = FilterExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and_expr(&mut self) -> Result<FilterExpr, SparqlParseError> {
        let mut left = self.parse_unary_expr()?;
        while self.eat(&Tok::AndAnd) {
            let right = self.parse_unary_expr()?;
            left = FilterExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_unary_expr(&mut self) -> Result<FilterExpr, SparqlParseError> {
        if self.eat(&Tok::Bang) {
            let inner = self.parse_unary_expr()?;
            return Ok(FilterExpr::Not(Box::new(inner)));
        }
        if self.eat(&Tok::LParen) {
            let inner = self.parse_or_expr()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(inner);
        }
        let left = self.parse_operand()?;
        let op = match self.next().tok {
            Tok::Cmp(op) => op,
            _ => return Err(self.err_here("expected comparison operator")),
        };
        let right = self.parse_operand()?;
        Ok(FilterExpr::Compare(op, left, right))
    }

    fn parse_operand(&mut self) -> Result<Operand, SparqlParseError> {
        match self.next().tok {
            Tok::Var(name) => Ok(Operand::Var(name)),
            Tok::Iri(iri) => Ok(Operand::Const(Term::Iri(iri))),
            Tok::Literal(term) => Ok(Operand::Const(term)),
            _ => Err(self.err_here("expected variable, literal or IRI")),
        }
    }
}
