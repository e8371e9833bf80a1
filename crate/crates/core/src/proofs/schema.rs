//! Axiom schemata with formula and variable metavariables.
//!
//! A [`Substitution`] binds the formula metavariables `phi`, `psi` and the
//! variable metavariables `x`, `y`, `z`. Each schema can be instantiated from
//! a substitution (checking its side conditions) or matched against a formula,
//! which recovers the substitution.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::syntax::{Formula, Threshold, Var};

/// Atoms beyond this many make the truth-table check refuse.
pub const TAUT_ATOM_CAP: usize = 12;

const FORMULA_METAVARS: [&str; 2] = ["phi", "psi"];
const VAR_METAVARS: [&str; 3] = ["x", "y", "z"];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub formulas: BTreeMap<String, Formula>,
    pub vars: BTreeMap<String, Var>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn formula(mut self, meta: &str, f: Formula) -> Self {
        self.formulas.insert(meta.to_string(), f);
        self
    }

    pub fn var(mut self, meta: &str, v: impl Into<String>) -> Self {
        self.vars.insert(meta.to_string(), v.into());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty() && self.vars.is_empty()
    }

    fn f(&self, meta: &str) -> Result<&Formula, String> {
        self.formulas
            .get(meta)
            .ok_or_else(|| format!("substitution lacks `{meta}`"))
    }

    fn v(&self, meta: &str) -> Result<&str, String> {
        self.vars
            .get(meta)
            .map(String::as_str)
            .ok_or_else(|| format!("substitution lacks `{meta}`"))
    }

    /// Splits `key := value` bindings; `phi`/`psi` take formulas, the rest
    /// variables.
    pub fn bind(&mut self, key: &str, value: &str) -> Result<(), String> {
        if FORMULA_METAVARS.contains(&key) {
            let f = crate::syntax::parse(value).map_err(|e| format!("in `{key}`: {e}"))?;
            self.formulas.insert(key.to_string(), f);
        } else if VAR_METAVARS.contains(&key) {
            let v = value.trim();
            if v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(format!("`{key}` must be bound to a variable, got `{v}`"));
            }
            self.vars.insert(key.to_string(), v.to_string());
        } else {
            return Err(format!("unknown metavariable `{key}`"));
        }
        Ok(())
    }
}

/// `[phi := P(x), x := x]`, variables after formulas, each sorted by name.
impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .formulas
            .iter()
            .map(|(k, v)| format!("{k} := {v}"))
            .chain(self.vars.iter().map(|(k, v)| format!("{k} := {v}")))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The axiom schemata: the first-order list (Axiom 0) and Keisler's Axioms 1–4
/// for the schematic quantifier `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schema {
    /// Propositional tautology over maximal non-propositional subformulas.
    Taut,
    /// `∀x φ → φ[y/x]`, `y` free for `x` in `φ`.
    AllInst,
    /// `∀x(φ → ψ) → (∀x φ → ∀x ψ)`.
    AllDist,
    /// `φ → ∀x φ`, `x` not free in `φ`.
    Vacuous,
    /// `∃x φ ↔ ¬∀x ¬φ`.
    ExDef,
    /// `x = x`.
    EqRefl,
    /// `x = y → (φ → ψ)`, `φ` atomic and `ψ` obtained by replacing some
    /// occurrences of `x` by `y`.
    EqSubst,
    /// `¬Qx(x = y ∨ x = z)`, `x` distinct from `y` and `z`.
    Keisler1,
    /// `∀x(φ → ψ) → (Qx φ → Qx ψ)`.
    Keisler2,
    /// `Qx φ → Qy φ[y/x]`, `y ≠ x`, `y` free for `x` and not free in `φ`.
    Keisler3,
    /// `Qy∃x φ → (∃x Qy φ ∨ Qx∃y φ)`, `x ≠ y`.
    Keisler4,
}

pub const AXIOM_ZERO: [Schema; 7] = [
    Schema::Taut,
    Schema::AllInst,
    Schema::AllDist,
    Schema::Vacuous,
    Schema::ExDef,
    Schema::EqRefl,
    Schema::EqSubst,
];

pub const KEISLER: [Schema; 4] = [
    Schema::Keisler1,
    Schema::Keisler2,
    Schema::Keisler3,
    Schema::Keisler4,
];

fn q(x: &str, f: Formula) -> Formula {
    Formula::CountAtLeast(Threshold::Schematic, x.to_string(), Arc::new(f))
}

impl Schema {
    /// Identifier used in proof files: `taut`, `all-inst`, ..., `ax1`..`ax4`.
    pub fn id(self) -> &'static str {
        match self {
            Schema::Taut => "taut",
            Schema::AllInst => "all-inst",
            Schema::AllDist => "all-dist",
            Schema::Vacuous => "vacuous",
            Schema::ExDef => "ex-def",
            Schema::EqRefl => "eq-refl",
            Schema::EqSubst => "eq-subst",
            Schema::Keisler1 => "ax1",
            Schema::Keisler2 => "ax2",
            Schema::Keisler3 => "ax3",
            Schema::Keisler4 => "ax4",
        }
    }

    pub fn from_id(id: &str) -> Option<Schema> {
        AXIOM_ZERO
            .iter()
            .chain(KEISLER.iter())
            .copied()
            .find(|s| s.id() == id)
    }

    /// Keisler axiom number, if any.
    pub fn keisler_index(self) -> Option<u8> {
        KEISLER.iter().position(|&s| s == self).map(|i| i as u8 + 1)
    }

    pub fn keisler(index: u8) -> Option<Schema> {
        KEISLER.get((index as usize).checked_sub(1)?).copied()
    }

    /// Metavariables a recorded substitution must bind.
    pub fn metavariables(self) -> &'static [&'static str] {
        match self {
            Schema::Taut => &[],
            Schema::AllInst => &["phi", "x", "y"],
            Schema::AllDist | Schema::Keisler2 => &["phi", "psi", "x"],
            Schema::Vacuous | Schema::ExDef => &["phi", "x"],
            Schema::EqRefl => &["x"],
            Schema::EqSubst => &["phi", "psi", "x", "y"],
            Schema::Keisler1 => &["x", "y", "z"],
            Schema::Keisler3 | Schema::Keisler4 => &["phi", "x", "y"],
        }
    }

    /// The instance under `s`, or the violated side condition.
    pub fn instantiate(self, s: &Substitution) -> Result<Formula, String> {
        use Formula as F;
        Ok(match self {
            Schema::Taut => return Err("tautologies have no schematic form".into()),
            Schema::AllInst => {
                let (phi, x, y) = (s.f("phi")?, s.v("x")?, s.v("y")?);
                if !phi.free_for(y, x) {
                    return Err(format!("`{y}` is not free for `{x}` in `{phi}`"));
                }
                F::implies(F::forall(x, phi.clone()), phi.substitute(x, y))
            }
            Schema::AllDist => {
                let (phi, psi, x) = (s.f("phi")?, s.f("psi")?, s.v("x")?);
                F::implies(
                    F::forall(x, F::implies(phi.clone(), psi.clone())),
                    F::implies(F::forall(x, phi.clone()), F::forall(x, psi.clone())),
                )
            }
            Schema::Vacuous => {
                let (phi, x) = (s.f("phi")?, s.v("x")?);
                if phi.has_free(x) {
                    return Err(format!("`{x}` is free in `{phi}`"));
                }
                F::implies(phi.clone(), F::forall(x, phi.clone()))
            }
            Schema::ExDef => {
                let (phi, x) = (s.f("phi")?, s.v("x")?);
                F::iff(
                    F::exists(x, phi.clone()),
                    F::not(F::forall(x, F::not(phi.clone()))),
                )
            }
            Schema::EqRefl => {
                let x = s.v("x")?;
                F::eq(x, x)
            }
            Schema::EqSubst => {
                let (phi, psi, x, y) = (s.f("phi")?, s.f("psi")?, s.v("x")?, s.v("y")?);
                if !replaces_some(phi, psi, x, y) {
                    return Err(format!(
                        "`{psi}` is not `{phi}` with occurrences of `{x}` replaced by `{y}`"
                    ));
                }
                F::implies(F::eq(x, y), F::implies(phi.clone(), psi.clone()))
            }
            Schema::Keisler1 => {
                let (x, y, z) = (s.v("x")?, s.v("y")?, s.v("z")?);
                if x == y || x == z {
                    return Err(format!("`{x}` must differ from `{y}` and `{z}`"));
                }
                F::not(q(x, F::or(F::eq(x, y), F::eq(x, z))))
            }
            Schema::Keisler2 => {
                let (phi, psi, x) = (s.f("phi")?, s.f("psi")?, s.v("x")?);
                F::implies(
                    F::forall(x, F::implies(phi.clone(), psi.clone())),
                    F::implies(q(x, phi.clone()), q(x, psi.clone())),
                )
            }
            Schema::Keisler3 => {
                let (phi, x, y) = (s.f("phi")?, s.v("x")?, s.v("y")?);
                if x == y {
                    return Err("the renamed variable must differ from the bound one".into());
                }
                if phi.has_free(y) {
                    return Err(format!("`{y}` is already free in `{phi}`"));
                }
                if !phi.free_for(y, x) {
                    return Err(format!("`{y}` is not free for `{x}` in `{phi}`"));
                }
                F::implies(q(x, phi.clone()), q(y, phi.substitute(x, y)))
            }
            Schema::Keisler4 => {
                let (phi, x, y) = (s.f("phi")?, s.v("x")?, s.v("y")?);
                if x == y {
                    return Err(format!("`{x}` and `{y}` must differ"));
                }
                F::implies(
                    q(y, F::exists(x, phi.clone())),
                    F::or(
                        F::exists(x, q(y, phi.clone())),
                        q(x, F::exists(y, phi.clone())),
                    ),
                )
            }
        })
    }

    /// Reads the metavariables off `f`'s shape. Variables the shape leaves
    /// open (the `y` of a vacuous instantiation) come from `hint`.
    fn decompose(self, f: &Formula, hint: &Substitution) -> Vec<Substitution> {
        use Formula as F;
        let base = Substitution::new;
        match (self, f) {
            (Schema::AllInst, F::Implies(lhs, rhs)) => {
                let F::Forall(x, phi) = &**lhs else {
                    return vec![];
                };
                // The replacement is one of rhs's free variables, or `x` itself.
                let mut ys: BTreeSet<String> = rhs.free_vars();
                ys.insert(x.clone());
                if let Some(y) = hint.vars.get("y") {
                    ys.insert(y.clone());
                }
                let mut order: Vec<String> = hint.vars.get("y").cloned().into_iter().collect();
                order.extend(ys);
                order
                    .into_iter()
                    .map(|y| {
                        base()
                            .formula("phi", (**phi).clone())
                            .var("x", x)
                            .var("y", y)
                    })
                    .collect()
            }
            (Schema::AllDist, F::Implies(lhs, _)) | (Schema::Keisler2, F::Implies(lhs, _)) => {
                let F::Forall(x, body) = &**lhs else {
                    return vec![];
                };
                let F::Implies(phi, psi) = &**body else {
                    return vec![];
                };
                vec![base()
                    .formula("phi", (**phi).clone())
                    .formula("psi", (**psi).clone())
                    .var("x", x)]
            }
            (Schema::Vacuous, F::Implies(phi, rhs)) => {
                let F::Forall(x, _) = &**rhs else {
                    return vec![];
                };
                vec![base().formula("phi", (**phi).clone()).var("x", x)]
            }
            (Schema::ExDef, F::Iff(lhs, _)) => {
                let F::Exists(x, phi) = &**lhs else {
                    return vec![];
                };
                vec![base().formula("phi", (**phi).clone()).var("x", x)]
            }
            (Schema::EqRefl, F::Equal(x, _)) => vec![base().var("x", x)],
            (Schema::EqSubst, F::Implies(eq, rest)) => {
                let (F::Equal(x, y), F::Implies(phi, psi)) = (&**eq, &**rest) else {
                    return vec![];
                };
                vec![base()
                    .formula("phi", (**phi).clone())
                    .formula("psi", (**psi).clone())
                    .var("x", x)
                    .var("y", y)]
            }
            (Schema::Keisler1, F::Not(inner)) => {
                let F::CountAtLeast(Threshold::Schematic, x, body) = &**inner else {
                    return vec![];
                };
                let F::Or(a, b) = &**body else { return vec![] };
                let (F::Equal(_, y), F::Equal(_, z)) = (&**a, &**b) else {
                    return vec![];
                };
                vec![base().var("x", x).var("y", y).var("z", z)]
            }
            (Schema::Keisler3, F::Implies(lhs, rhs)) => {
                let (
                    F::CountAtLeast(Threshold::Schematic, x, phi),
                    F::CountAtLeast(Threshold::Schematic, y, _),
                ) = (&**lhs, &**rhs)
                else {
                    return vec![];
                };
                vec![base()
                    .formula("phi", (**phi).clone())
                    .var("x", x)
                    .var("y", y)]
            }
            (Schema::Keisler4, F::Implies(lhs, _)) => {
                let F::CountAtLeast(Threshold::Schematic, y, body) = &**lhs else {
                    return vec![];
                };
                let F::Exists(x, phi) = &**body else {
                    return vec![];
                };
                vec![base()
                    .formula("phi", (**phi).clone())
                    .var("x", x)
                    .var("y", y)]
            }
            _ => vec![],
        }
    }

    /// The substitution making `f` an instance, found by matching `f`'s shape.
    /// `Taut` yields the empty substitution when `f` is a tautology.
    pub fn find(self, f: &Formula) -> Option<Substitution> {
        self.find_with(f, &Substitution::new())
    }

    fn find_with(self, f: &Formula, hint: &Substitution) -> Option<Substitution> {
        if self == Schema::Taut {
            return matches!(is_tautology(f), Ok(true)).then(Substitution::new);
        }
        self.decompose(f, hint)
            .into_iter()
            .find(|s| self.instantiate(s).as_ref() == Ok(f))
    }

    /// Checks that `f` is an instance. With a recorded substitution, the
    /// substitution must bind every metavariable and instantiate to `f`;
    /// without one, the instance is searched for.
    pub fn check(
        self,
        f: &Formula,
        recorded: Option<&Substitution>,
    ) -> Result<Substitution, String> {
        if self == Schema::Taut {
            return match is_tautology(f)? {
                true => Ok(Substitution::new()),
                false => Err("not a propositional tautology".into()),
            };
        }
        match recorded {
            None => self
                .find(f)
                .ok_or_else(|| format!("not an instance of {}", self.id())),
            Some(s) => {
                for m in self.metavariables() {
                    if !s.formulas.contains_key(*m) && !s.vars.contains_key(*m) {
                        return Err(format!("substitution lacks `{m}`"));
                    }
                }
                let extra: Vec<&String> = s
                    .formulas
                    .keys()
                    .chain(s.vars.keys())
                    .filter(|k| !self.metavariables().contains(&k.as_str()))
                    .collect();
                if let Some(k) = extra.first() {
                    return Err(format!("{} has no metavariable `{k}`", self.id()));
                }
                let inst = self.instantiate(s)?;
                if &inst == f {
                    Ok(s.clone())
                } else {
                    Err(format!("substitution {s} gives `{inst}`, not this formula"))
                }
            }
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// `psi` is atomic `phi` with some (possibly no) occurrences of `x` replaced by `y`.
fn replaces_some(phi: &Formula, psi: &Formula, x: &str, y: &str) -> bool {
    let ok = |a: &String, b: &String| a == b || (a == x && b == y);
    match (phi, psi) {
        (Formula::Rel(r, xs), Formula::Rel(s, ys)) => {
            r == s && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| ok(a, b))
        }
        (Formula::Equal(a, b), Formula::Equal(c, d)) => ok(a, c) && ok(b, d),
        _ => false,
    }
}

/// Truth-table check treating every non-propositional subformula as an atom.
pub fn is_tautology(f: &Formula) -> Result<bool, String> {
    let mut atoms: HashMap<&Formula, usize> = HashMap::new();
    collect_atoms(f, &mut atoms);
    if atoms.len() > TAUT_ATOM_CAP {
        return Err(format!(
            "{} propositional atoms exceed the cap of {TAUT_ATOM_CAP}",
            atoms.len()
        ));
    }
    Ok((0u32..1 << atoms.len()).all(|row| truth(f, &atoms, row)))
}

fn collect_atoms<'a>(f: &'a Formula, atoms: &mut HashMap<&'a Formula, usize>) {
    use Formula::*;
    match f {
        True | False => {}
        Not(_) | And(..) | Or(..) | Implies(..) | Iff(..) | BigAnd(_) | BigOr(_) => {
            for (c, _) in f.children() {
                collect_atoms(c, atoms);
            }
        }
        _ => {
            let next = atoms.len();
            atoms.entry(f).or_insert(next);
        }
    }
}

fn truth(f: &Formula, atoms: &HashMap<&Formula, usize>, row: u32) -> bool {
    use Formula::*;
    let t = |g: &Formula| truth(g, atoms, row);
    match f {
        True => true,
        False => false,
        Not(a) => !t(a),
        And(a, b) => t(a) && t(b),
        Or(a, b) => t(a) || t(b),
        Implies(a, b) => !t(a) || t(b),
        Iff(a, b) => t(a) == t(b),
        BigAnd(xs) => xs.iter().all(|x| t(x)),
        BigOr(xs) => xs.iter().any(|x| t(x)),
        _ => row >> atoms[f] & 1 == 1,
    }
}
