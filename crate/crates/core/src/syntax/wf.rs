use std::fmt;

use serde::{Deserialize, Serialize};

use crate::structures::Vocabulary;
use crate::syntax::{render, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    UnknownSymbol,
    ArityMismatch { expected: usize, found: usize },
    FreeVariable(String),
    EmptyConnective,
    ZeroThreshold,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Rendering of the offending node.
    pub node: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::UnknownSymbol => write!(f, "unknown relation symbol in `{}`", self.node),
            ViolationKind::ArityMismatch { expected, found } => write!(
                f,
                "`{}` has {found} arguments, symbol arity is {expected}",
                self.node
            ),
            ViolationKind::FreeVariable(v) => {
                write!(f, "variable `{v}` is free in `{}`", self.node)
            }
            ViolationKind::EmptyConnective => write!(f, "empty big connective `{}`", self.node),
            ViolationKind::ZeroThreshold => write!(f, "counting threshold 0 in `{}`", self.node),
        }
    }
}

/// Checks relation names and arities against `v` and that every variable is
/// bound or listed in `free`. Pass an empty `free` for sentence mode.
pub fn check_wf(f: &Formula, v: &Vocabulary, free: &[&str]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    walk(f, v, &mut scope, &mut out);
    out
}

fn walk(f: &Formula, v: &Vocabulary, scope: &mut Vec<String>, out: &mut Vec<Violation>) {
    let node = || render(f);
    let check_var = |x: &str, scope: &Vec<String>, out: &mut Vec<Violation>| {
        if !scope.iter().any(|s| s == x) {
            out.push(Violation {
                kind: ViolationKind::FreeVariable(x.to_string()),
                node: node(),
            });
        }
    };
    match f {
        Formula::Rel(name, args) => {
            match v.arity_of(name) {
                None => out.push(Violation {
                    kind: ViolationKind::UnknownSymbol,
                    node: node(),
                }),
                Some(arity) if arity != args.len() => out.push(Violation {
                    kind: ViolationKind::ArityMismatch {
                        expected: arity,
                        found: args.len(),
                    },
                    node: node(),
                }),
                Some(_) => {}
            }
            for a in args {
                check_var(a, scope, out);
            }
        }
        Formula::Equal(a, b) => {
            check_var(a, scope, out);
            if a != b {
                check_var(b, scope, out);
            }
        }
        Formula::BigAnd(items) | Formula::BigOr(items) if items.is_empty() => out.push(Violation {
            kind: ViolationKind::EmptyConnective,
            node: node(),
        }),
        Formula::CountAtLeast(crate::syntax::Threshold::AtLeast(0), ..) => out.push(Violation {
            kind: ViolationKind::ZeroThreshold,
            node: node(),
        }),
        _ => {}
    }
    for (child, bound) in f.children() {
        let depth = scope.len();
        scope.extend(bound.iter().map(|s| s.to_string()));
        walk(child, v, scope, out);
        scope.truncate(depth);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn arity_violation() {
        let v = Vocabulary::parse("P/1").unwrap();
        let f = Formula::rel("P", ["x", "y"]);
        let errs = check_wf(&f, &v, &["x", "y"]);
        assert_eq!(errs.len(), 1);
        assert_eq!(
            errs[0].kind,
            ViolationKind::ArityMismatch {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn well_formed_sentence() {
        let v = Vocabulary::parse("P/1").unwrap();
        assert!(check_wf(&parse("exists x. P(x)").unwrap(), &v, &[]).is_empty());
    }

    #[test]
    fn free_variable_in_sentence_mode() {
        let v = Vocabulary::parse("P/1").unwrap();
        let errs = check_wf(&parse("P(x)").unwrap(), &v, &[]);
        assert_eq!(errs[0].kind, ViolationKind::FreeVariable("x".into()));
        assert!(check_wf(&parse("P(x)").unwrap(), &v, &["x"]).is_empty());
    }

    #[test]
    fn unknown_symbol_and_empty_connective() {
        let v = Vocabulary::parse("P/1").unwrap();
        let errs = check_wf(&parse("exists x. S(x)").unwrap(), &v, &[]);
        assert_eq!(errs[0].kind, ViolationKind::UnknownSymbol);
        let errs = check_wf(&Formula::BigOr(vec![]), &v, &[]);
        assert_eq!(errs[0].kind, ViolationKind::EmptyConnective);
    }
}
