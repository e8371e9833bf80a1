//! Text format for structures.
//!
//! ```text
//! size 3
//! rel P/1: (0); (2)
//! rel R/2: (0,1); (1,2)
//! rel S/1:
//! ```
//!
//! Grammar (whitespace between tokens is free, `#` starts a line comment):
//!
//! ```text
//! document := "size" INT rel*
//! rel      := "rel" NAME "/" INT ":" [tuple (";" tuple)*]
//! tuple    := "(" [INT ("," INT)*] ")"
//! ```
//!
//! Every `rel` line declares one vocabulary symbol, in order. Names starting
//! with `$` are reserved for internal auxiliary symbols.

use crate::error::{Error, Result};
use crate::structures::{format_tuples, Structure, Symbol, Vocabulary};

pub fn render_structure(s: &Structure) -> String {
    let mut out = format!("size {}\n", s.size());
    for (sym, rel) in s.vocabulary().symbols().iter().zip(s.relations()) {
        let tuples = format_tuples(rel);
        if tuples.is_empty() {
            out.push_str(&format!("rel {}/{}:\n", sym.name, sym.arity));
        } else {
            out.push_str(&format!("rel {}/{}: {}\n", sym.name, sym.arity, tuples));
        }
    }
    out
}

pub fn parse_structure(text: &str) -> Result<Structure> {
    let body: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let mut rest = body.trim_start();
    rest = expect_word(rest, "size")?;
    let (size, r) = take_int(rest)?;
    rest = r.trim_start();

    let mut symbols = Vec::new();
    let mut tuples: Vec<Vec<Vec<usize>>> = Vec::new();
    while !rest.is_empty() {
        rest = expect_word(rest, "rel")?;
        let (name, r) = take_name(rest)?;
        if name.starts_with('$') {
            return Err(bad(format!("symbol name `{name}` is reserved")));
        }
        rest = expect_char(r, '/')?;
        let (arity, r) = take_int(rest)?;
        rest = expect_char(r, ':')?;
        let mut rel_tuples = Vec::new();
        if rest.starts_with('(') {
            loop {
                let (t, r) = take_tuple(rest)?;
                rel_tuples.push(t);
                rest = r.trim_start();
                match rest.strip_prefix(';') {
                    Some(r) => rest = r.trim_start(),
                    None => break,
                }
            }
        }
        symbols.push(Symbol::new(name, arity));
        tuples.push(rel_tuples);
    }

    let mut s = Structure::empty(Vocabulary::new(symbols.clone())?, size);
    for (sym, ts) in symbols.iter().zip(tuples) {
        for t in ts {
            s.insert(&sym.name, &t)?;
        }
    }
    Ok(s)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidStructure(msg.into())
}

fn expect_word<'a>(s: &'a str, word: &str) -> Result<&'a str> {
    let s = s.trim_start();
    match s.strip_prefix(word) {
        Some(r) if !r.starts_with(|c: char| c.is_alphanumeric() || c == '_') => Ok(r.trim_start()),
        _ => Err(bad(format!("expected `{word}` near `{}`", snippet(s)))),
    }
}

fn expect_char(s: &str, c: char) -> Result<&str> {
    let s = s.trim_start();
    s.strip_prefix(c)
        .map(str::trim_start)
        .ok_or_else(|| bad(format!("expected `{c}` near `{}`", snippet(s))))
}

fn take_int(s: &str) -> Result<(usize, &str)> {
    let s = s.trim_start();
    let end = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    let n = s[..end]
        .parse()
        .map_err(|_| bad(format!("expected a number near `{}`", snippet(s))))?;
    Ok((n, &s[end..]))
}

fn take_name(s: &str) -> Result<(&str, &str)> {
    let s = s.trim_start();
    let end = s
        .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '$'))
        .unwrap_or(s.len());
    if end == 0 {
        return Err(bad(format!("expected a symbol name near `{}`", snippet(s))));
    }
    Ok((&s[..end], &s[end..]))
}

pub(crate) fn take_tuple(s: &str) -> Result<(Vec<usize>, &str)> {
    let mut rest = expect_char(s, '(')?;
    let mut tuple = Vec::new();
    if let Some(r) = rest.strip_prefix(')') {
        return Ok((tuple, r));
    }
    loop {
        let (a, r) = take_int(rest)?;
        tuple.push(a);
        let r = r.trim_start();
        if let Some(r) = r.strip_prefix(',') {
            rest = r;
        } else {
            return Ok((tuple, expect_char(r, ')')?));
        }
    }
}

fn snippet(s: &str) -> &str {
    let end = s.char_indices().nth(20).map(|(i, _)| i).unwrap_or(s.len());
    &s[..end]
}
