//! Hilbert-style proofs in Keisler's system for the schematic quantifier `Q`,
//! and a soundness scan of its axioms under finite counting readings.
//!
//! Rules of inference are modus ponens and generalization. Generalization on
//! `x` is allowed only when `x` is free in no declared premise.

mod scan;
mod schema;
mod text;

use serde::{Deserialize, Serialize};

use crate::syntax::{Formula, Var};

pub use scan::{instance_pool, soundness_scan, ScanCounterexample, ScanReport};
pub use schema::{is_tautology, Schema, Substitution, AXIOM_ZERO, KEISLER, TAUT_ATOM_CAP};
pub use text::{parse_proof, render_proof};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Justification {
    /// 1-based index into the declared premises.
    Premise {
        index: usize,
    },
    /// A first-order or Keisler schema. Without a substitution the checker
    /// searches for one.
    Axiom {
        schema: Schema,
        substitution: Option<Substitution>,
    },
    /// Line `minor` is `A`, line `major` is `A -> B`, this line is `B`.
    ModusPonens {
        minor: usize,
        major: usize,
    },
    Generalization {
        line: usize,
        var: Var,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofLine {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proof {
    pub premises: Vec<Formula>,
    pub lines: Vec<ProofLine>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum Verdict {
    Accept,
    /// `line` is 1-based.
    Reject {
        line: usize,
        reason: String,
    },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// The Keisler axiom `φ` instantiates, with its substitution.
pub fn is_axiom_instance(f: &Formula) -> Option<(u8, Substitution)> {
    KEISLER.iter().find_map(|s| {
        s.find(f)
            .map(|sub| (s.keisler_index().expect("Keisler schema"), sub))
    })
}

/// The first-order (Axiom 0) schema `φ` instantiates, if any.
pub fn axiom_zero_instance(f: &Formula) -> Option<(Schema, Substitution)> {
    AXIOM_ZERO
        .iter()
        .find_map(|s| s.find(f).map(|sub| (*s, sub)))
}

/// Checks every line in order and reports the first one that fails.
pub fn check_proof(p: &Proof) -> Verdict {
    if p.lines.is_empty() {
        return Verdict::Reject {
            line: 0,
            reason: "proof has no lines".into(),
        };
    }
    for (i, line) in p.lines.iter().enumerate() {
        let n = i + 1;
        if let Err(reason) = check_line(p, n, line) {
            return Verdict::Reject { line: n, reason };
        }
    }
    Verdict::Accept
}

fn earlier(p: &Proof, n: usize, cited: usize) -> Result<&Formula, String> {
    if cited == 0 || cited >= n {
        return Err(format!(
            "line {n} cites line {cited}, which does not precede it"
        ));
    }
    Ok(&p.lines[cited - 1].formula)
}

fn check_line(p: &Proof, n: usize, line: &ProofLine) -> Result<(), String> {
    let f = &line.formula;
    match &line.justification {
        Justification::Premise { index } => {
            let declared = index
                .checked_sub(1)
                .and_then(|i| p.premises.get(i))
                .ok_or_else(|| format!("no premise {index} is declared"))?;
            if declared != f {
                return Err(format!("premise {index} is `{declared}`, not this formula"));
            }
        }
        Justification::Axiom {
            schema,
            substitution,
        } => {
            schema.check(f, substitution.as_ref())?;
        }
        Justification::ModusPonens { minor, major } => {
            let a = earlier(p, n, *minor)?;
            let imp = earlier(p, n, *major)?;
            let Formula::Implies(ante, cons) = imp else {
                return Err(format!("line {major} is not an implication"));
            };
            if &**ante != a {
                return Err(format!("line {major}'s antecedent is not line {minor}"));
            }
            if &**cons != f {
                return Err(format!("line {major}'s consequent is not this formula"));
            }
        }
        Justification::Generalization { line: from, var } => {
            let body = earlier(p, n, *from)?;
            if f != &Formula::forall(var.clone(), body.clone()) {
                return Err(format!("expected `forall {var}.` applied to line {from}"));
            }
            if let Some(i) = p.premises.iter().position(|q| q.has_free(var)) {
                return Err(format!("`{var}` is free in premise {}", i + 1));
            }
        }
    }
    Ok(())
}
