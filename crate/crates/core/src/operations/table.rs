//! Built-in operations and the operation table text format.
//!
//! ```text
//! # union with a fixed point, on {0,1}
//! size 2
//! inputs 1
//! output 1
//! default empty
//! entry {} => {(0)}
//! entry {(1)} => {(0); (1)}
//! ```
//!
//! `inputs` lists the input arities (possibly none), `output` the output
//! arity. Each `entry` gives one set per input, then `=>` and the output set.
//! Sets are `{}` or `{t; t; ..}` with tuples written as in the structure
//! format. With `default empty`, missing inputs map to `∅`; otherwise every
//! missing input is undefined.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::operations::{input_vocabulary, GlobalOperation, LocalOperation, OpRule};
use crate::structures::{enumerate_structures, format_tuples, take_tuple, Relation};

/// Names accepted by [`builtin_operation`] and [`builtin_global`].
pub const BUILTIN_OPERATIONS: &[&str] = &["and", "or", "exists", "not"];

/// A built-in as a global operation. `arity` is the output arity; `exists`
/// projects an `arity + 1`-ary input onto its first `arity` coordinates.
pub fn builtin_global(name: &str, arity: usize) -> Option<GlobalOperation> {
    Some(match name {
        "and" | "intersection" => {
            GlobalOperation::from_rule("and", vec![arity, arity], arity, |_, a| {
                a[0].intersection(&a[1])
            })
        }
        "or" | "union" => {
            GlobalOperation::from_rule("or", vec![arity, arity], arity, |_, a| a[0].union(&a[1]))
        }
        "not" | "complement" => {
            GlobalOperation::from_rule("not", vec![arity], arity, |_, a| a[0].complement())
        }
        "exists" | "projection" => {
            GlobalOperation::from_rule("exists", vec![arity + 1], arity, move |n, a| {
                let mut out = Relation::empty(arity, n);
                for t in a[0].iter() {
                    out.insert(&t[..arity]);
                }
                out
            })
        }
        _ => return None,
    })
}

pub fn builtin_operation(name: &str, size: usize, arity: usize) -> Option<LocalOperation> {
    builtin_global(name, arity)
        .map(|g| g.at(size).expect("rule families are defined at every size"))
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidOperation(msg.into())
}

fn parse_set(s: &str, arity: usize, size: usize) -> Result<(Relation, &str)> {
    let mut rest = s
        .trim_start()
        .strip_prefix('{')
        .ok_or_else(|| bad(format!("expected `{{` near `{}`", s.trim())))?
        .trim_start();
    let mut rel = Relation::empty(arity, size);
    if let Some(r) = rest.strip_prefix('}') {
        return Ok((rel, r));
    }
    loop {
        let (t, r) = take_tuple(rest).map_err(|e| bad(e.to_string()))?;
        if t.len() != arity || !rel.insert(&t) {
            return Err(bad(format!(
                "tuple {t:?} does not fit arity {arity} over {size} elements"
            )));
        }
        let r = r.trim_start();
        if let Some(r) = r.strip_prefix(';') {
            rest = r;
        } else if let Some(r) = r.strip_prefix('}') {
            return Ok((rel, r));
        } else {
            return Err(bad(format!("expected `;` or `}}` near `{}`", r.trim())));
        }
    }
}

fn numbers(s: &str, key: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|w| {
            w.parse()
                .map_err(|_| bad(format!("`{key}` expects numbers, found `{w}`")))
        })
        .collect()
}

/// Parses a table. The operation is named `name`.
pub fn parse_operation(name: &str, text: &str) -> Result<LocalOperation> {
    let mut size = None;
    let mut inputs: Option<Vec<usize>> = None;
    let mut output = None;
    let mut default_empty = false;
    let mut rows: Vec<(usize, &str)> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let at = |e: Error| bad(format!("line {}: {e}", no + 1));
        match key {
            "size" => {
                size = Some(
                    numbers(rest, key)
                        .map_err(at)?
                        .first()
                        .copied()
                        .ok_or_else(|| at(bad("missing size")))?,
                )
            }
            "inputs" => inputs = Some(numbers(rest, key).map_err(at)?),
            "output" => {
                output = Some(
                    numbers(rest, key)
                        .map_err(at)?
                        .first()
                        .copied()
                        .ok_or_else(|| at(bad("missing arity")))?,
                )
            }
            "default" if rest.trim() == "empty" => default_empty = true,
            "entry" => rows.push((no + 1, rest)),
            _ => return Err(at(bad(format!("unknown line `{line}`")))),
        }
    }
    let size = size.ok_or_else(|| bad("missing `size` line"))?;
    let inputs = inputs.ok_or_else(|| bad("missing `inputs` line"))?;
    let output = output.ok_or_else(|| bad("missing `output` line"))?;
    let mut entries = HashMap::new();
    for (no, row) in rows {
        let at = |e: Error| bad(format!("line {no}: {e}"));
        let mut rest = row;
        let mut args = Vec::new();
        for &a in &inputs {
            let (rel, r) = parse_set(rest, a, size).map_err(at)?;
            args.push(rel);
            rest = r;
        }
        let rest = rest
            .trim_start()
            .strip_prefix("=>")
            .ok_or_else(|| at(bad("expected `=>`")))?;
        let (out, rest) = parse_set(rest, output, size).map_err(at)?;
        if !rest.trim().is_empty() {
            return Err(at(bad(format!("trailing text `{}`", rest.trim()))));
        }
        if entries.insert(args, out).is_some() {
            return Err(at(bad("duplicate entry")));
        }
    }
    LocalOperation::from_table(name, size, inputs, output, entries, default_empty)
}

/// Renders the full table of `f`. Rule-based operations are tabulated.
pub fn render_operation(f: &LocalOperation, budget: u128) -> Result<String> {
    let mut out = format!("size {}\ninputs", f.size());
    for a in f.input_arities() {
        out.push_str(&format!(" {a}"));
    }
    out.push_str(&format!("\noutput {}\n", f.output_arity()));
    let default_empty = matches!(
        f.rule(),
        OpRule::Table {
            default_empty: true,
            ..
        }
    );
    if default_empty {
        out.push_str("default empty\n");
    }
    let set = |r: &Relation| format!("{{{}}}", format_tuples(r));
    for s in enumerate_structures(&input_vocabulary(f.input_arities()), f.size(), budget)? {
        let value = match f.apply(s.relations()) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if default_empty && value.is_empty() {
            continue;
        }
        out.push_str("entry");
        for r in s.relations() {
            out.push(' ');
            out.push_str(&set(r));
        }
        out.push_str(" => ");
        out.push_str(&set(&value));
        out.push('\n');
    }
    Ok(out)
}
