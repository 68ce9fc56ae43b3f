//! The line-oriented `.pes` text format.
//!
//! ```text
//! pes CH
//! event a1 : a
//! event b1 : b
//! cause a1 < b1
//! conflict a1 # b2      # '♯' works too
//! terminating maximal
//! ```

use std::fmt;
use std::fmt::Write as _;

use pesbisim::{RawPes, RawTermination};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Event { id: String, label: String },
    Cause { before: String, after: String },
    Conflict { a: String, b: String },
    Terminating(RawTermination),
}

/// A parsed file: the name plus statements in source order, with spans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PesDocument {
    pub name: String,
    pub statements: Vec<(Span, Statement)>,
}

impl PesDocument {
    pub fn to_raw(&self) -> RawPes {
        let mut raw = RawPes::new(self.name.clone());
        for (_, st) in &self.statements {
            match st {
                Statement::Event { id, label } => raw = raw.event(id, label),
                Statement::Cause { before, after } => raw = raw.cause(before, after),
                Statement::Conflict { a, b } => raw = raw.conflict(a, b),
                Statement::Terminating(t) => raw = raw.termination(t.clone()),
            }
        }
        raw
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Colon,
    Less,
    Sharp,
    Open,
    Close,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "'{w}'"),
            Tok::Colon => f.write_str("':'"),
            Tok::Less => f.write_str("'<'"),
            Tok::Sharp => f.write_str("'#'"),
            Tok::Open => f.write_str("'{'"),
            Tok::Close => f.write_str("'}'"),
            Tok::Comma => f.write_str("','"),
        }
    }
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, ':' | '<' | '#' | '♯' | '{' | '}' | ',')
}

/// Splits one line into tokens, dropping a trailing comment. A `#` starts a
/// comment at line start or after whitespace, except in the operator slot of
/// a `conflict` statement.
fn lex(line: &str, line_no: usize) -> Result<Vec<(Span, Tok)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut toks: Vec<(Span, Tok)> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = Span {
            line: line_no,
            column: i + 1,
        };
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '#' => {
                let after_space = i == 0 || chars[i - 1].is_whitespace();
                let operator_slot = toks.len() == 2 && toks[0].1 == Tok::Word("conflict".into());
                if after_space && !operator_slot {
                    break;
                }
                if !operator_slot {
                    return Err(ParseError {
                        span,
                        message: "unexpected '#'".into(),
                    });
                }
                Tok::Sharp
            }
            '♯' => Tok::Sharp,
            ':' => Tok::Colon,
            '<' => Tok::Less,
            '{' => Tok::Open,
            '}' => Tok::Close,
            ',' => Tok::Comma,
            _ => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                toks.push((span, Tok::Word(chars[start..i].iter().collect())));
                continue;
            }
        };
        toks.push((span, tok));
        i += 1;
    }
    Ok(toks)
}

struct Line {
    toks: Vec<(Span, Tok)>,
    pos: usize,
    end: Span,
}

impl Line {
    fn next(&mut self, what: &str) -> Result<(Span, Tok), ParseError> {
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| ParseError {
            span: self.end,
            message: format!("expected {what}, found end of line"),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn word(&mut self, what: &str) -> Result<(Span, String), ParseError> {
        match self.next(what)? {
            (span, Tok::Word(w)) => Ok((span, w)),
            (span, t) => Err(ParseError {
                span,
                message: format!("expected {what}, found {t}"),
            }),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.next(&tok.to_string())? {
            (_, t) if t == tok => Ok(()),
            (span, t) => Err(ParseError {
                span,
                message: format!("expected {tok}, found {t}"),
            }),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some((span, t)) => Err(ParseError {
                span: *span,
                message: format!("unexpected {t} after statement"),
            }),
        }
    }
}

/// Parses a document, checking that events are declared once and before use
/// and that there is at most one `terminating` line. Structural conditions
/// (cycles, conflicts between causes) are left to `validate_pes`.
pub fn parse_pes(text: &str) -> Result<PesDocument, ParseError> {
    let mut name: Option<String> = None;
    let mut statements: Vec<(Span, Statement)> = Vec::new();
    let mut declared: Vec<String> = Vec::new();
    let mut terminating_seen = false;
    let mut last_line = 1;
    for (idx, text_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let toks = lex(text_line, line_no)?;
        let Some((start, Tok::Word(keyword))) = toks.first().cloned() else {
            if let Some((span, t)) = toks.first() {
                return Err(ParseError {
                    span: *span,
                    message: format!("expected a statement keyword, found {t}"),
                });
            }
            continue;
        };
        let mut line = Line {
            toks,
            pos: 1,
            end: Span {
                line: line_no,
                column: text_line.chars().count() + 1,
            },
        };
        if name.is_none() && keyword != "pes" {
            return Err(ParseError {
                span: start,
                message: "expected 'pes <name>' first".into(),
            });
        }
        let known = |declared: &[String], span: Span, id: &str| {
            if declared.iter().any(|d| d == id) {
                Ok(id.to_string())
            } else {
                Err(ParseError {
                    span,
                    message: format!("undeclared event '{id}'"),
                })
            }
        };
        let statement = match keyword.as_str() {
            "pes" => {
                if name.is_some() {
                    return Err(ParseError {
                        span: start,
                        message: "second 'pes' line".into(),
                    });
                }
                name = Some(line.word("a name")?.1);
                line.finish()?;
                continue;
            }
            "event" => {
                let (span, id) = line.word("an event identifier")?;
                line.expect(Tok::Colon)?;
                let (_, label) = line.word("a label")?;
                if declared.contains(&id) {
                    return Err(ParseError {
                        span,
                        message: format!("event '{id}' declared twice"),
                    });
                }
                declared.push(id.clone());
                Statement::Event { id, label }
            }
            "cause" => {
                let (s1, a) = line.word("an event identifier")?;
                let a = known(&declared, s1, &a)?;
                line.expect(Tok::Less)?;
                let (s2, b) = line.word("an event identifier")?;
                let b = known(&declared, s2, &b)?;
                Statement::Cause {
                    before: a,
                    after: b,
                }
            }
            "conflict" => {
                let (s1, a) = line.word("an event identifier")?;
                let a = known(&declared, s1, &a)?;
                line.expect(Tok::Sharp)?;
                let (s2, b) = line.word("an event identifier")?;
                let b = known(&declared, s2, &b)?;
                Statement::Conflict { a, b }
            }
            "terminating" => {
                if terminating_seen {
                    return Err(ParseError {
                        span: start,
                        message: "second 'terminating' line".into(),
                    });
                }
                terminating_seen = true;
                let t = match line.next("'maximal', 'none' or '{'")? {
                    (_, Tok::Word(w)) if w == "maximal" => RawTermination::Maximal,
                    (_, Tok::Word(w)) if w == "none" => RawTermination::None,
                    (_, Tok::Open) => {
                        RawTermination::Explicit(parse_sets(&mut line, &declared, known)?)
                    }
                    (span, t) => {
                        return Err(ParseError {
                            span,
                            message: format!("expected 'maximal', 'none' or '{{', found {t}"),
                        })
                    }
                };
                Statement::Terminating(t)
            }
            other => {
                return Err(ParseError {
                    span: start,
                    message: format!("unknown statement '{other}'"),
                })
            }
        };
        line.finish()?;
        statements.push((start, statement));
    }
    let name = name.ok_or(ParseError {
        span: Span {
            line: last_line,
            column: 1,
        },
        message: "missing 'pes <name>' line".into(),
    })?;
    Ok(PesDocument { name, statements })
}

/// The body of `terminating { {a,b} {} ... }` after the outer `{`.
fn parse_sets(
    line: &mut Line,
    declared: &[String],
    known: impl Fn(&[String], Span, &str) -> Result<String, ParseError>,
) -> Result<Vec<Vec<String>>, ParseError> {
    let mut sets = Vec::new();
    loop {
        match line.next("'{' or '}'")? {
            (_, Tok::Close) => return Ok(sets),
            (_, Tok::Comma) => continue,
            (_, Tok::Open) => {
                let mut set = Vec::new();
                loop {
                    match line.peek() {
                        Some(Tok::Close) => {
                            line.pos += 1;
                            break;
                        }
                        Some(Tok::Comma) if !set.is_empty() => line.pos += 1,
                        _ => {
                            let (span, id) = line.word("an event identifier or '}'")?;
                            set.push(known(declared, span, &id)?);
                        }
                    }
                }
                sets.push(set);
            }
            (span, t) => {
                return Err(ParseError {
                    span,
                    message: format!("expected '{{' or '}}', found {t}"),
                })
            }
        }
    }
}

/// Renders declarations in the `.pes` format; parsing the result gives the
/// same declarations back.
pub fn print_pes(raw: &RawPes) -> String {
    let mut out = String::new();
    writeln!(out, "pes {}", raw.name).unwrap();
    for (id, label) in &raw.events {
        writeln!(out, "event {id} : {label}").unwrap();
    }
    for (a, b) in &raw.causes {
        writeln!(out, "cause {a} < {b}").unwrap();
    }
    for (a, b) in &raw.conflicts {
        writeln!(out, "conflict {a} # {b}").unwrap();
    }
    match &raw.termination {
        RawTermination::Maximal => {}
        RawTermination::None => out.push_str("terminating none\n"),
        RawTermination::Explicit(sets) => {
            let sets: Vec<String> = sets
                .iter()
                .map(|s| format!("{{{}}}", s.join(",")))
                .collect();
            writeln!(out, "terminating {{ {} }}", sets.join(" ")).unwrap();
        }
    }
    out
}
