//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := iff
//! iff     := imp ["<->" iff]                       right-associative
//! imp     := or ["->" imp]                         right-associative
//! or      := and ("|" and)*                        left-associative
//! and     := unary ("&" unary)*                    left-associative
//! unary   := "!" unary | quant | primary
//! quant   := ("exists" | "forall") VAR "." formula
//!          | "E>=" INT VAR "." formula
//!          | "Q" VAR "." formula
//!          | ("I" | "J") VAR VAR "." "(" formula ")" "(" formula ")"
//!          | "W" VAR VAR "." formula
//!          | "QK[" NAME "]" VAR+ "." formula
//! primary := "(" formula ")" | "true" | "false"
//!          | ("And" | "Or") "{" formula ("," formula)* "}"
//!          | NAME "(" [VAR ("," VAR)*] ")"
//!          | VAR "=" VAR
//! ```
//!
//! A quantifier body extends as far right as possible, so quantifiers bind
//! weaker than every connective. `Q`, `I`, `J`, `W` and `E` are keywords only
//! when followed by a variable; `Q(x)` is an ordinary atom.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Formula, Threshold};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u32),
    CountKw,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Dot,
    Comma,
    Eq,
    Bang,
    Amp,
    Bar,
    Arrow,
    DArrow,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::CountKw => f.write_str("`E>=`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::DArrow => f.write_str("`<->`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        let push = |tok: Tok, width: usize, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: l,
                column: col,
            });
            width
        };
        let width = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => 1,
            '(' => push(Tok::LParen, 1, &mut out),
            ')' => push(Tok::RParen, 1, &mut out),
            '{' => push(Tok::LBrace, 1, &mut out),
            '}' => push(Tok::RBrace, 1, &mut out),
            '[' if matches!(out.last(), Some(Spanned { tok: Tok::Ident(w), .. }) if w == "QK") => {
                // Class names may contain `-`; take everything up to `]`.
                push(Tok::LBracket, 1, &mut out);
                let end = (i + 1..chars.len())
                    .find(|&j| chars[j] == ']' || chars[j] == '\n')
                    .unwrap_or(chars.len());
                let name: String = chars[i + 1..end].iter().collect();
                let name = name.trim();
                if !name.is_empty() {
                    out.push(Spanned {
                        tok: Tok::Ident(name.to_string()),
                        line: l,
                        column: col + 1,
                    });
                }
                end - i
            }
            '[' => push(Tok::LBracket, 1, &mut out),
            ']' => push(Tok::RBracket, 1, &mut out),
            '.' => push(Tok::Dot, 1, &mut out),
            ',' => push(Tok::Comma, 1, &mut out),
            '=' => push(Tok::Eq, 1, &mut out),
            '!' => push(Tok::Bang, 1, &mut out),
            '&' => push(Tok::Amp, 1, &mut out),
            '|' => push(Tok::Bar, 1, &mut out),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Arrow, 2, &mut out),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::DArrow, 3, &mut out)
            }
            'E' if chars.get(i + 1) == Some(&'>') && chars.get(i + 2) == Some(&'=') => {
                push(Tok::CountKw, 3, &mut out)
            }
            c if c.is_ascii_digit() => {
                let end = (i..chars.len())
                    .find(|&j| !chars[j].is_ascii_digit())
                    .unwrap_or(chars.len());
                let digits: String = chars[i..end].iter().collect();
                let n = digits.parse().map_err(|_| ParseError {
                    line: l,
                    column: col,
                    expected: "a 32-bit integer".into(),
                    found: digits.clone(),
                })?;
                push(Tok::Int(n), end - i, &mut out)
            }
            c if is_ident_start(c) => {
                let end = (i + 1..chars.len())
                    .find(|&j| !is_ident_char(chars[j]))
                    .unwrap_or(chars.len());
                let word: String = chars[i..end].iter().collect();
                push(Tok::Ident(word), end - i, &mut out)
            }
            other => {
                return Err(ParseError {
                    line: l,
                    column: col,
                    expected: "a token".into(),
                    found: format!("`{other}`"),
                })
            }
        };
        i += width;
        column += width;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

const RESERVED: &[&str] = &["exists", "forall", "true", "false", "And", "Or", "QK"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            expected: expected.into(),
            found: s.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn var(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if !RESERVED.contains(&name.as_str()) && !name.starts_with('$') => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error("a variable")),
        }
    }

    fn is_var_at(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Ident(name) if !RESERVED.contains(&name.as_str()) && !name.starts_with('$'))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::Iff(Arc::new(lhs), Arc::new(rhs)));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Arc::new(lhs), Arc::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::And(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::Not(Arc::new(self.unary()?)));
        }
        if let Some(q) = self.quantifier()? {
            return Ok(q);
        }
        self.primary()
    }

    fn body(&mut self) -> Result<Arc<Formula>, ParseError> {
        self.expect(Tok::Dot)?;
        Ok(Arc::new(self.formula()?))
    }

    fn parenthesized(&mut self) -> Result<Arc<Formula>, ParseError> {
        self.expect(Tok::LParen)?;
        let f = self.formula()?;
        self.expect(Tok::RParen)?;
        Ok(Arc::new(f))
    }

    fn quantifier(&mut self) -> Result<Option<Formula>, ParseError> {
        if *self.peek() == Tok::CountKw {
            self.bump();
            let k = match self.bump() {
                Tok::Int(k) if k >= 1 => k,
                _ => {
                    self.pos -= 1;
                    return Err(self.error("a positive threshold"));
                }
            };
            let x = self.var()?;
            let body = self.body()?;
            return Ok(Some(Formula::CountAtLeast(Threshold::AtLeast(k), x, body)));
        }
        let Tok::Ident(word) = self.peek().clone() else {
            return Ok(None);
        };
        let f = match word.as_str() {
            "exists" | "forall" if self.is_var_at(1) => {
                self.bump();
                let x = self.var()?;
                let body = self.body()?;
                if word == "exists" {
                    Formula::Exists(x, body)
                } else {
                    Formula::Forall(x, body)
                }
            }
            "Q" if self.is_var_at(1) => {
                self.bump();
                let x = self.var()?;
                Formula::CountAtLeast(Threshold::Schematic, x, self.body()?)
            }
            "I" | "J" if self.is_var_at(1) => {
                self.bump();
                let x = self.var()?;
                let y = self.var()?;
                self.expect(Tok::Dot)?;
                let a = self.parenthesized()?;
                let b = self.parenthesized()?;
                if word == "I" {
                    Formula::Hartig(x, y, a, b)
                } else {
                    Formula::Rescher(x, y, a, b)
                }
            }
            "W" if self.is_var_at(1) => {
                self.bump();
                let x = self.var()?;
                let y = self.var()?;
                Formula::WellOrder(x, y, self.body()?)
            }
            "QK" if *self.peek_at(1) == Tok::LBracket => {
                self.bump();
                self.bump();
                let name = match self.bump() {
                    Tok::Ident(n) => n,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("a class name"));
                    }
                };
                self.expect(Tok::RBracket)?;
                let mut vars = vec![self.var()?];
                while self.is_var_at(0) {
                    vars.push(self.var()?);
                }
                Formula::Oracle(name, vars, self.body()?)
            }
            _ => return Ok(None),
        };
        Ok(Some(f))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(word) => {
                let next = self.peek_at(1).clone();
                match (word.as_str(), next) {
                    ("true", _) => {
                        self.bump();
                        Ok(Formula::True)
                    }
                    ("false", _) => {
                        self.bump();
                        Ok(Formula::False)
                    }
                    ("And" | "Or", Tok::LBrace) => {
                        self.bump();
                        self.bump();
                        let mut items = vec![Arc::new(self.formula()?)];
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            items.push(Arc::new(self.formula()?));
                        }
                        self.expect(Tok::RBrace)?;
                        Ok(if word == "And" {
                            Formula::BigAnd(items)
                        } else {
                            Formula::BigOr(items)
                        })
                    }
                    (_, Tok::LParen) if !RESERVED.contains(&word.as_str()) => {
                        self.bump();
                        self.bump();
                        let mut args = Vec::new();
                        if *self.peek() != Tok::RParen {
                            args.push(self.var()?);
                            while *self.peek() == Tok::Comma {
                                self.bump();
                                args.push(self.var()?);
                            }
                        }
                        self.expect(Tok::RParen)?;
                        Ok(Formula::Rel(word, args))
                    }
                    (_, Tok::Eq) => {
                        let a = self.var()?;
                        self.bump();
                        let b = self.var()?;
                        Ok(Formula::Equal(a, b))
                    }
                    _ => Err(self.error("an atom, quantifier or `(`")),
                }
            }
            _ => Err(self.error("a formula")),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error("end of input"));
    }
    Ok(f)
}
