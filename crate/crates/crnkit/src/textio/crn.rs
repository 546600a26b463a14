//! The arrow-notation text format.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::model::{
    build_network_with_warnings, BuildWarning, Complex, ModelError, Network, Reaction, SpeciesId,
};

/// Errors from reading the `.crn` text format.
///
/// `Syntax` and `ZeroCoefficient` are malformed text; `SelfLoop` and
/// `EmptyNetwork` are well-formed text describing an invalid network.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrnError {
    #[error("line {line}, column {column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
    #[error("line {line}: explicit zero coefficient")]
    ZeroCoefficient { line: usize },
    #[error("line {line}: reaction source and target are the same complex")]
    SelfLoop { line: usize },
    #[error("no reactions found")]
    EmptyNetwork,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Uint(BigUint),
    Ident(String),
    Plus,
    Forward,
    Reversible,
}

struct Lexer<'a> {
    text: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Lexer {
            text: text.as_bytes(),
            pos: 0,
            line,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, expected: &str) -> CrnError {
        CrnError::Syntax {
            line: self.line,
            column: self.column(),
            expected: expected.to_string(),
        }
    }

    fn skip_spaces(&mut self) {
        while self.pos < self.text.len() && (self.text[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token, or `None` at end of line.
    fn next(&mut self) -> Result<Option<(Token, usize)>, CrnError> {
        self.skip_spaces();
        if self.pos >= self.text.len() {
            return Ok(None);
        }
        let start = self.column();
        let c = self.text[self.pos] as char;
        let token = if c.is_ascii_digit() {
            let begin = self.pos;
            while self.pos < self.text.len() && (self.text[self.pos] as char).is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.text[begin..self.pos]).unwrap();
            Token::Uint(digits.parse().expect("digit string"))
        } else if c.is_ascii_alphabetic() || c == '_' {
            let begin = self.pos;
            while self.pos < self.text.len() {
                let c = self.text[self.pos] as char;
                if c.is_ascii_alphanumeric() || c == '_' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let name = std::str::from_utf8(&self.text[begin..self.pos]).unwrap();
            Token::Ident(name.to_string())
        } else if c == '+' {
            self.pos += 1;
            Token::Plus
        } else if self.text[self.pos..].starts_with(b"->") {
            self.pos += 2;
            Token::Forward
        } else if self.text[self.pos..].starts_with(b"<->") {
            self.pos += 3;
            Token::Reversible
        } else {
            return Err(self.error("a species, coefficient, '+', '->', or '<->'"));
        };
        Ok(Some((token, start)))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<(Token, usize)>>,
    line: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Parser {
            lexer: Lexer::new(text, line),
            peeked: None,
            line,
        }
    }

    fn peek(&mut self) -> Result<Option<&(Token, usize)>, CrnError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(self.peeked.as_ref().unwrap().as_ref())
    }

    fn advance(&mut self) -> Result<Option<(Token, usize)>, CrnError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    fn syntax_error(&self, column: usize, expected: &str) -> CrnError {
        CrnError::Syntax {
            line: self.line,
            column,
            expected: expected.to_string(),
        }
    }

    fn end_column(&self) -> usize {
        self.lexer.column()
    }

    fn parse_complex(&mut self) -> Result<Complex, CrnError> {
        let mut terms: Vec<(SpeciesId, BigUint)> = Vec::new();
        loop {
            let (token, column) = self
                .advance()?
                .ok_or_else(|| self.syntax_error(self.end_column(), "a complex"))?;
            match token {
                Token::Uint(coeff) => {
                    // A coefficient must be followed by a species name,
                    // except for the bare zero complex.
                    match self.peek()? {
                        Some((Token::Ident(_), _)) => {
                            let Some((Token::Ident(name), name_column)) = self.advance()? else {
                                unreachable!()
                            };
                            if coeff.is_zero() {
                                return Err(CrnError::ZeroCoefficient { line: self.line });
                            }
                            let species = SpeciesId::new(name)
                                .map_err(|_| self.syntax_error(name_column, "a species name"))?;
                            terms.push((species, coeff));
                        }
                        _ if coeff.is_zero() && terms.is_empty() => {
                            // The zero complex stands alone.
                            if let Some((Token::Plus, column)) = self.peek()? {
                                let column = *column;
                                return Err(self.syntax_error(column, "'->' or '<->' after '0'"));
                            }
                            return Ok(Complex::zero());
                        }
                        _ => {
                            return Err(self.syntax_error(
                                self.end_column(),
                                "a species name after a coefficient",
                            ))
                        }
                    }
                }
                Token::Ident(name) => {
                    let species = SpeciesId::new(name)
                        .map_err(|_| self.syntax_error(column, "a species name"))?;
                    terms.push((species, BigUint::one()));
                }
                _ => return Err(self.syntax_error(column, "a species or coefficient")),
            }
            match self.peek()? {
                Some((Token::Plus, _)) => {
                    self.advance()?;
                }
                _ => break,
            }
        }
        Ok(Complex::from_terms(terms))
    }
}

/// One parsed statement: a chain of complexes joined by arrows.
fn parse_statement(text: &str, line: usize, reactions: &mut Vec<Reaction>) -> Result<(), CrnError> {
    let mut parser = Parser::new(text, line);
    let mut current = parser.parse_complex()?;
    let mut links = 0usize;
    loop {
        match parser.advance()? {
            None => break,
            Some((Token::Forward, _)) => {
                let next = parser.parse_complex()?;
                reactions.push(make_reaction(current, next.clone(), line)?);
                current = next;
                links += 1;
            }
            Some((Token::Reversible, _)) => {
                let next = parser.parse_complex()?;
                reactions.push(make_reaction(current.clone(), next.clone(), line)?);
                reactions.push(make_reaction(next.clone(), current, line)?);
                current = next;
                links += 1;
            }
            Some((_, column)) => return Err(parser.syntax_error(column, "'->' or '<->'")),
        }
    }
    if links == 0 {
        return Err(parser.syntax_error(parser.end_column(), "'->' or '<->'"));
    }
    Ok(())
}

fn make_reaction(source: Complex, target: Complex, line: usize) -> Result<Reaction, CrnError> {
    Reaction::new(source, target).map_err(|_| CrnError::SelfLoop { line })
}

fn statement_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = raw.split('#').next().unwrap_or("");
        if stripped.trim().is_empty() {
            None
        } else {
            Some((i + 1, stripped))
        }
    })
}

/// Parses a `.crn` document into a network.
pub fn parse_crn(text: &str) -> Result<Network, CrnError> {
    parse_crn_with_warnings(text).map(|(network, _)| network)
}

/// Like [`parse_crn`] but also reports duplicate-reaction warnings.
pub fn parse_crn_with_warnings(text: &str) -> Result<(Network, Vec<BuildWarning>), CrnError> {
    let mut reactions = Vec::new();
    for (line, statement) in statement_lines(text) {
        parse_statement(statement, line, &mut reactions)?;
    }
    build_network_with_warnings(reactions).map_err(|e| match e {
        ModelError::EmptyNetwork => CrnError::EmptyNetwork,
        // Self-loops are caught per statement with a line number.
        other => unreachable!("unexpected build error: {other}"),
    })
}

/// Parses a single complex, e.g. `"2A + B"` or `"0"`.
pub fn parse_complex(text: &str) -> Result<Complex, CrnError> {
    let mut parser = Parser::new(text, 1);
    let complex = parser.parse_complex()?;
    match parser.advance()? {
        None => Ok(complex),
        Some((_, column)) => Err(parser.syntax_error(column, "end of complex")),
    }
}

/// Parses a single forward reaction, e.g. `"2A + 2B -> 3A + 3B"`.
/// Chains and `<->` are rejected here.
pub fn parse_reaction(text: &str) -> Result<Reaction, CrnError> {
    let mut reactions = Vec::new();
    parse_statement(text, 1, &mut reactions)?;
    match <[Reaction; 1]>::try_from(reactions) {
        Ok([reaction]) => Ok(reaction),
        Err(_) => Err(CrnError::Syntax {
            line: 1,
            column: 1,
            expected: "exactly one forward reaction".to_string(),
        }),
    }
}

/// Canonical text form of a network: one statement per line, reactions in
/// canonical order, reversible pairs merged into `<->`.
pub fn serialize_crn(network: &Network) -> String {
    use std::collections::BTreeSet;
    let mut emitted: BTreeSet<Reaction> = BTreeSet::new();
    let mut out = String::new();
    for reaction in network.reactions() {
        if emitted.contains(reaction) {
            continue;
        }
        let reverse = reaction.reversed();
        if network.has_reaction(&reverse) {
            out.push_str(&format!(
                "{} <-> {}\n",
                reaction.source(),
                reaction.target()
            ));
            emitted.insert(reverse);
        } else {
            out.push_str(&format!("{} -> {}\n", reaction.source(), reaction.target()));
        }
        emitted.insert(reaction.clone());
    }
    out
}

/// Formats a reaction in the same syntax [`parse_reaction`] accepts.
pub fn format_reaction(reaction: &Reaction) -> String {
    format!("{} -> {}", reaction.source(), reaction.target())
}
