//! Proof file format.
//!
//! ```text
//! # comment
//! premise 1: forall x. (P(x) -> R(x))
//! 1. forall x. (P(x) -> R(x)) ; premise 1
//! 2. (forall x. (P(x) -> R(x))) -> ((Q x. P(x)) -> Q x. R(x)) ; ax2 [phi := P(x), psi := R(x), x := x]
//! 3. (Q x. P(x)) -> Q x. R(x) ; mp 1 2
//! ```
//!
//! Justifications: `premise <i>`, `ax0 <schema> [subst]`, `ax<1-4> [subst]`,
//! `mp <i> <j>` (line `i` is `A`, line `j` is `A -> B`), `gen <i> <var>`.
//! Axiom-0 schema ids are `taut`, `all-inst`, `all-dist`, `vacuous`, `ex-def`,
//! `eq-refl`, `eq-subst`. A substitution is `[meta := value, ...]` with
//! formula metavariables `phi`, `psi` and variable metavariables `x`, `y`,
//! `z`; omitting it asks the checker to find one. The formula and the
//! justification are split at the last `;` of the line.

use crate::error::{Error, Result};
use crate::syntax::parse;

use super::{Justification, Proof, ProofLine, Schema, Substitution};

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::ProofFormat(format!("line {line}: {msg}"))
}

pub fn parse_proof(text: &str) -> Result<Proof> {
    let mut premises = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let at = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(rest) = t.strip_prefix("premise ") {
            let (idx, formula) = rest
                .split_once(':')
                .ok_or_else(|| err(at, "expected `premise <i>: <formula>`"))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| err(at, format!("bad premise index `{}`", idx.trim())))?;
            if idx != premises.len() + 1 {
                return Err(err(at, format!("premise {idx} declared out of order")));
            }
            premises.push(parse(formula).map_err(|e| err(at, e))?);
            continue;
        }
        let (num, rest) = t
            .split_once('.')
            .ok_or_else(|| err(at, "expected `<n>. <formula> ; <justification>`"))?;
        let num: usize = num
            .trim()
            .parse()
            .map_err(|_| err(at, format!("bad step number `{}`", num.trim())))?;
        if num != lines.len() + 1 {
            return Err(err(at, format!("step {num} out of sequence")));
        }
        let (formula, just) = rest
            .rsplit_once(';')
            .ok_or_else(|| err(at, "missing `; <justification>`"))?;
        lines.push(ProofLine {
            formula: parse(formula).map_err(|e| err(at, e))?,
            justification: parse_justification(just.trim()).map_err(|e| err(at, e))?,
        });
    }
    if lines.is_empty() {
        return Err(Error::ProofFormat("proof has no steps".into()));
    }
    Ok(Proof { premises, lines })
}

fn parse_justification(text: &str) -> std::result::Result<Justification, String> {
    let (head, subst) = match text.find('[') {
        Some(i) => (text[..i].trim(), Some(parse_substitution(&text[i..])?)),
        None => (text, None),
    };
    let words: Vec<&str> = head.split_whitespace().collect();
    let index = |w: &str| {
        w.parse::<usize>()
            .map_err(|_| format!("bad line number `{w}`"))
    };
    let plain = |j: Justification| match subst {
        Some(_) => Err("only axioms take a substitution".to_string()),
        None => Ok(j),
    };
    match words.as_slice() {
        ["premise", i] => plain(Justification::Premise { index: index(i)? }),
        ["mp", i, j] => plain(Justification::ModusPonens {
            minor: index(i)?,
            major: index(j)?,
        }),
        ["gen", i, v] => plain(Justification::Generalization {
            line: index(i)?,
            var: v.to_string(),
        }),
        ["ax0", id] => match Schema::from_id(id) {
            Some(schema) if schema.keisler_index().is_none() => Ok(Justification::Axiom {
                schema,
                substitution: subst,
            }),
            _ => Err(format!("unknown first-order schema `{id}`")),
        },
        [ax] if ax.starts_with("ax") => {
            let schema = ax[2..]
                .parse::<u8>()
                .ok()
                .and_then(Schema::keisler)
                .ok_or_else(|| format!("unknown axiom `{ax}`"))?;
            Ok(Justification::Axiom {
                schema,
                substitution: subst,
            })
        }
        _ => Err(format!("cannot read justification `{text}`")),
    }
}

/// `[k := v, ...]`, splitting on commas outside parentheses and braces.
fn parse_substitution(text: &str) -> std::result::Result<Substitution, String> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("substitution `{text}` must be bracketed"))?;
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in inner.char_indices() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&inner[start..]);
    let mut s = Substitution::new();
    for part in parts.into_iter().filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once(":=")
            .ok_or_else(|| format!("expected `meta := value`, got `{}`", part.trim()))?;
        s.bind(k.trim(), v)?;
    }
    Ok(s)
}

pub fn render_proof(p: &Proof) -> String {
    let mut out = String::new();
    for (i, f) in p.premises.iter().enumerate() {
        out.push_str(&format!("premise {}: {f}\n", i + 1));
    }
    for (i, line) in p.lines.iter().enumerate() {
        let just = match &line.justification {
            Justification::Premise { index } => format!("premise {index}"),
            Justification::ModusPonens { minor, major } => format!("mp {minor} {major}"),
            Justification::Generalization { line, var } => format!("gen {line} {var}"),
            Justification::Axiom {
                schema,
                substitution,
            } => {
                let head = match schema.keisler_index() {
                    Some(_) => schema.id().to_string(),
                    None => format!("ax0 {}", schema.id()),
                };
                match substitution {
                    Some(s) => format!("{head} {s}"),
                    None => head,
                }
            }
        };
        out.push_str(&format!("{}. {} ; {just}\n", i + 1, line.formula));
    }
    out
}
