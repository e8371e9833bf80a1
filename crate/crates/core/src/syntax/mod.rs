//! Formula AST for first-order logic with finite big connectives and
//! generalized quantifiers, plus its concrete text syntax.
//!
//! Terms are variables only. Children are reference counted so that
//! synthesized sentences can share subformulas.

mod parser;
mod render;
mod wf;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use parser::{parse, ParseError};
pub use render::render;
pub use wf::{check_wf, Violation, ViolationKind};

pub type Var = String;

/// Threshold of a counting quantifier. `Schematic` is the `Q` of the Keisler
/// axioms, whose meaning is bound at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Threshold {
    AtLeast(u32),
    Schematic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Rel(String, Vec<Var>),
    Equal(Var, Var),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    /// Finite conjunction; nonempty.
    BigAnd(Vec<Arc<Formula>>),
    /// Finite disjunction; nonempty.
    BigOr(Vec<Arc<Formula>>),
    Exists(Var, Arc<Formula>),
    Forall(Var, Arc<Formula>),
    CountAtLeast(Threshold, Var, Arc<Formula>),
    /// `I x y. (φ) (ψ)`: as many `x` satisfy `φ` as `y` satisfy `ψ`.
    Hartig(Var, Var, Arc<Formula>, Arc<Formula>),
    /// `J x y. (φ) (ψ)`: at least as many `x` satisfy `φ` as `y` satisfy `ψ`.
    Rescher(Var, Var, Arc<Formula>, Arc<Formula>),
    /// `W x y. φ`: `φ` defines a well-order (on finite domains: a strict
    /// linear order) of the whole domain.
    WellOrder(Var, Var, Arc<Formula>),
    /// `QK[name] x̄. φ`: the relation defined by `φ` belongs to the class.
    Oracle(String, Vec<Var>, Arc<Formula>),
}

/// Serialized as its rendering; deserialized by parsing.
impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&render(self))
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

impl Formula {
    pub fn rel<S: Into<String>>(
        name: impl Into<String>,
        args: impl IntoIterator<Item = S>,
    ) -> Formula {
        Formula::Rel(name.into(), args.into_iter().map(Into::into).collect())
    }

    pub fn eq(a: impl Into<String>, b: impl Into<String>) -> Formula {
        Formula::Equal(a.into(), b.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    pub fn exists(x: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(x.into(), Arc::new(f))
    }

    pub fn forall(x: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(x.into(), Arc::new(f))
    }

    pub fn count(k: u32, x: impl Into<String>, f: Formula) -> Formula {
        Formula::CountAtLeast(Threshold::AtLeast(k), x.into(), Arc::new(f))
    }

    pub fn q(x: impl Into<String>, f: Formula) -> Formula {
        Formula::CountAtLeast(Threshold::Schematic, x.into(), Arc::new(f))
    }

    pub fn hartig(x: impl Into<String>, y: impl Into<String>, f: Formula, g: Formula) -> Formula {
        Formula::Hartig(x.into(), y.into(), Arc::new(f), Arc::new(g))
    }

    pub fn rescher(x: impl Into<String>, y: impl Into<String>, f: Formula, g: Formula) -> Formula {
        Formula::Rescher(x.into(), y.into(), Arc::new(f), Arc::new(g))
    }

    pub fn well_order(x: impl Into<String>, y: impl Into<String>, f: Formula) -> Formula {
        Formula::WellOrder(x.into(), y.into(), Arc::new(f))
    }

    pub fn oracle<S: Into<String>>(
        class: impl Into<String>,
        vars: impl IntoIterator<Item = S>,
        f: Formula,
    ) -> Formula {
        Formula::Oracle(
            class.into(),
            vars.into_iter().map(Into::into).collect(),
            Arc::new(f),
        )
    }

    /// `⋀ items`, with the empty conjunction read as `true` and singletons unwrapped.
    pub fn big_and(items: Vec<Formula>) -> Formula {
        let mut items: Vec<Arc<Formula>> = items.into_iter().map(Arc::new).collect();
        match items.len() {
            0 => Formula::True,
            1 => Arc::unwrap_or_clone(items.pop().unwrap()),
            _ => Formula::BigAnd(items),
        }
    }

    /// `⋁ items`, with the empty disjunction read as `false` and singletons unwrapped.
    pub fn big_or(items: Vec<Formula>) -> Formula {
        let mut items: Vec<Arc<Formula>> = items.into_iter().map(Arc::new).collect();
        match items.len() {
            0 => Formula::False,
            1 => Arc::unwrap_or_clone(items.pop().unwrap()),
            _ => Formula::BigOr(items),
        }
    }

    /// Immediate subformulas paired with the variables bound on the way in.
    pub fn children(&self) -> Vec<(&Formula, Vec<&str>)> {
        use Formula::*;
        match self {
            True | False | Rel(..) | Equal(..) => vec![],
            Not(a) => vec![(a, vec![])],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => vec![(a, vec![]), (b, vec![])],
            BigAnd(xs) | BigOr(xs) => xs.iter().map(|x| (&**x, vec![])).collect(),
            Exists(x, a) | Forall(x, a) | CountAtLeast(_, x, a) => vec![(a, vec![x.as_str()])],
            Hartig(x, y, a, b) | Rescher(x, y, a, b) => {
                vec![(a, vec![x.as_str()]), (b, vec![y.as_str()])]
            }
            WellOrder(x, y, a) => vec![(a, vec![x.as_str(), y.as_str()])],
            Oracle(_, vs, a) => vec![(a, vs.iter().map(String::as_str).collect())],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            Formula::Rel(_, args) => args.iter().cloned().collect(),
            Formula::Equal(a, b) => [a.clone(), b.clone()].into_iter().collect(),
            _ => {
                let mut out = BTreeSet::new();
                for (child, bound) in self.children() {
                    for v in child.free_vars() {
                        if !bound.contains(&v.as_str()) {
                            out.insert(v);
                        }
                    }
                }
                out
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Formula::Rel(_, args) => args.iter().any(|a| a == x),
            Formula::Equal(a, b) => a == x || b == x,
            _ => self
                .children()
                .into_iter()
                .any(|(c, bound)| !bound.contains(&x) && c.has_free(x)),
        }
    }

    /// Relation symbols with the arities they are used at. A symbol used at
    /// two arities appears once per arity.
    pub fn relation_symbols(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<(String, usize)>) {
        if let Formula::Rel(name, args) = self {
            out.insert((name.clone(), args.len()));
        }
        for (c, _) in self.children() {
            c.collect_symbols(out);
        }
    }

    pub fn oracle_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn walk(f: &Formula, out: &mut BTreeSet<String>) {
            if let Formula::Oracle(name, _, _) = f {
                out.insert(name.clone());
            }
            for (c, _) in f.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Number of nodes in the tree (shared subformulas counted per occurrence).
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|(c, _)| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|(c, _)| c.depth())
            .max()
            .unwrap_or(0)
    }

    /// Replaces the free occurrences of `x` by `y` without renaming bound
    /// variables. Whether this captures `y` is reported by [`Formula::free_for`].
    pub fn substitute(&self, x: &str, y: &str) -> Formula {
        self.rename_free(&BTreeMap::from([(x.to_string(), y.to_string())]))
    }

    /// Simultaneous renaming of free variables.
    pub fn rename_free(&self, map: &BTreeMap<String, String>) -> Formula {
        use Formula::*;
        let v = |name: &String| map.get(name).cloned().unwrap_or_else(|| name.clone());
        let under = |bound: &[&String], body: &Arc<Formula>| -> Arc<Formula> {
            let inner: BTreeMap<String, String> = map
                .iter()
                .filter(|(k, _)| !bound.contains(k))
                .map(|(k, w)| (k.clone(), w.clone()))
                .collect();
            if inner.is_empty() {
                body.clone()
            } else {
                Arc::new(body.rename_free(&inner))
            }
        };
        match self {
            True => True,
            False => False,
            Rel(r, args) => Rel(r.clone(), args.iter().map(v).collect()),
            Equal(a, b) => Equal(v(a), v(b)),
            Not(a) => Not(under(&[], a)),
            And(a, b) => And(under(&[], a), under(&[], b)),
            Or(a, b) => Or(under(&[], a), under(&[], b)),
            Implies(a, b) => Implies(under(&[], a), under(&[], b)),
            Iff(a, b) => Iff(under(&[], a), under(&[], b)),
            BigAnd(xs) => BigAnd(xs.iter().map(|x| under(&[], x)).collect()),
            BigOr(xs) => BigOr(xs.iter().map(|x| under(&[], x)).collect()),
            Exists(x, a) => Exists(x.clone(), under(&[x], a)),
            Forall(x, a) => Forall(x.clone(), under(&[x], a)),
            CountAtLeast(k, x, a) => CountAtLeast(*k, x.clone(), under(&[x], a)),
            Hartig(x, y, a, b) => Hartig(x.clone(), y.clone(), under(&[x], a), under(&[y], b)),
            Rescher(x, y, a, b) => Rescher(x.clone(), y.clone(), under(&[x], a), under(&[y], b)),
            WellOrder(x, y, a) => WellOrder(x.clone(), y.clone(), under(&[x, y], a)),
            Oracle(k, vs, a) => {
                let bound: Vec<&String> = vs.iter().collect();
                Oracle(k.clone(), vs.clone(), under(&bound, a))
            }
        }
    }

    /// True when no free occurrence of `x` sits under a binder of `y`, i.e.
    /// substituting `y` for `x` captures nothing.
    pub fn free_for(&self, y: &str, x: &str) -> bool {
        if x == y {
            return true;
        }
        match self {
            Formula::Rel(..) | Formula::Equal(..) | Formula::True | Formula::False => true,
            _ => self.children().into_iter().all(|(c, bound)| {
                if bound.contains(&x) {
                    true
                } else if bound.contains(&y) {
                    !c.has_free(x)
                } else {
                    c.free_for(y, x)
                }
            }),
        }
    }

    /// Universal closure over the free variables, in sorted order.
    pub fn universal_closure(&self) -> Formula {
        self.free_vars()
            .into_iter()
            .rev()
            .fold(self.clone(), |acc, v| Formula::forall(v, acc))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
