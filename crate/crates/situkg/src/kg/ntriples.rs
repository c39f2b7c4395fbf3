//! Canonical N-Triples serialization and parsing.
//!
//! The on-disk graph format: one statement per line, UTF-8, LF line endings,
//! lines sorted as raw bytes. Sorting makes the output independent of
//! insertion order, so equal graphs serialize to identical bytes.

use super::graph::Graph;
use super::term::{Iri, Literal, Term, Triple};
use crate::error::{Error, Result};
use std::path::Path;

/// Serialize to canonical N-Triples text. The empty graph yields empty text.
pub fn serialize_ntriples(graph: &Graph) -> String {
    let mut lines: Vec<String> = graph.iter().map(Triple::to_ntriples).collect();
    lines.sort_unstable();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parse N-Triples text. Blank lines and `#` comment lines are tolerated;
/// blank nodes are not.
pub fn parse_ntriples(text: &str) -> Result<Graph> {
    let mut graph = Graph::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let triple = LineParser::new(line, line_no).parse_statement()?;
        graph.add(triple);
    }
    Ok(graph)
}

/// Parse a single term in N-Triples syntax (`<iri>` or a literal). Used to
/// round-trip entity keys through checkpoints.
pub fn parse_term(text: &str) -> Result<Term> {
    let mut parser = LineParser::new(text, 1);
    parser.skip_ws();
    let term = parser.parse_term()?;
    parser.skip_ws();
    if let Some(c) = parser.peek() {
        return Err(parser.err(format!("unexpected trailing content at {c:?}")));
    }
    Ok(term)
}

pub fn save_graph(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_ntriples(graph)).map_err(|e| Error::io(path, e))
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ntriples(&text)
}

struct LineParser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl LineParser {
    fn new(line: &str, line_no: usize) -> Self {
        LineParser {
            chars: line.chars().collect(),
            pos: 0,
            line: line_no,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.pos + 1,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t') {
            self.pos += 1;
        }
    }

    fn parse_statement(mut self) -> Result<Triple> {
        self.skip_ws();
        let subject = self.parse_iri()?;
        self.skip_ws();
        let predicate = self.parse_iri()?;
        self.skip_ws();
        let object = self.parse_term()?;
        self.skip_ws();
        match self.bump() {
            Some('.') => {}
            Some(c) => return Err(self.err(format!("expected terminal '.', found {c:?}"))),
            None => return Err(self.err("statement is missing terminal '.'")),
        }
        self.skip_ws();
        if let Some(c) = self.peek() {
            if c == '#' {
                // trailing comment
            } else {
                return Err(self.err(format!("unexpected trailing content starting at {c:?}")));
            }
        }
        Ok(Triple::new(subject, predicate, object))
    }

    fn parse_term(&mut self) -> Result<Term> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.parse_iri()?)),
            Some('"') => Ok(Term::Literal(self.parse_literal()?)),
            Some('_') => Err(self.err("blank nodes are not supported")),
            Some(c) => Err(self.err(format!("expected IRI or literal, found {c:?}"))),
            None => Err(self.err("expected IRI or literal, found end of line")),
        }
    }

    fn parse_iri(&mut self) -> Result<Iri> {
        match self.peek() {
            Some('<') => {
                self.bump();
            }
            Some('_') => return Err(self.err("blank nodes are not supported")),
            Some(c) => return Err(self.err(format!("expected '<' to open an IRI, found {c:?}"))),
            None => return Err(self.err("expected IRI, found end of line")),
        }
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some(c) if c.is_whitespace() => {
                    return Err(self.err("bad IRI: whitespace inside <...>"))
                }
                Some(c) => value.push(c),
                None => return Err(self.err("bad IRI: missing closing '>'")),
            }
        }
        Iri::new(value).map_err(|e| self.err(e.to_string()))
    }

    fn parse_literal(&mut self) -> Result<Literal> {
        self.bump(); // opening quote
        let mut lexical = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => {
                    let escaped = match self.bump() {
                        Some('\\') => '\\',
                        Some('"') => '"',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('t') => '\t',
                        Some('u') => self.parse_unicode_escape(4)?,
                        Some('U') => self.parse_unicode_escape(8)?,
                        Some(c) => return Err(self.err(format!("unknown escape \\{c}"))),
                        None => return Err(self.err("unterminated literal")),
                    };
                    lexical.push(escaped);
                }
                Some(c) => lexical.push(c),
                None => return Err(self.err("unterminated literal")),
            }
        }
        match self.peek() {
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.err("expected '^^' before datatype IRI"));
                }
                let datatype = self.parse_iri()?;
                Ok(Literal::typed(lexical, datatype))
            }
            Some('@') => {
                self.bump();
                let mut tag = String::new();
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    tag.push(self.bump().unwrap());
                }
                Literal::with_language(lexical, tag).map_err(|e| self.err(e.to_string()))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }

    fn parse_unicode_escape(&mut self, digits: usize) -> Result<char> {
        let mut code = 0u32;
        for _ in 0..digits {
            let c = self
                .bump()
                .ok_or_else(|| self.err("truncated unicode escape"))?;
            let d = c
                .to_digit(16)
                .ok_or_else(|| self.err(format!("bad hex digit {c:?} in unicode escape")))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.err(format!("invalid code point U+{code:04X}")))
    }
}
