//! The formulas `η_α(x)` and `η′_α` characterizing finite ordinals, and the
//! characterizing sentences `Φ_𝔄` and `Θ_K` built from them.
//!
//! With `<` the order symbol:
//!
//! ```text
//! η_α(x) := ∀y(y<x → ⋁_{β<α} η_β(y)) ∧ ⋀_{β<α} ∃y(y<x ∧ η_β(y))
//! η′_α   := ∀y ⋁_{β<α} η_β(y) ∧ ⋀_{β<α} ∃y η_β(y)
//! ```
//!
//! Empty disjunctions are `false` and empty conjunctions are dropped. Only two
//! variables are used: `η_β(y)` inside `η_α(x)` rebinds `x`, which it never
//! mentions, so `η_α` has `O(α)` distinct subformulas shared through `Arc`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{Bijection, Structure, Symbol, Vocabulary};
use crate::syntax::Formula;

/// Name of the auxiliary order symbol adjoined by the constructions here.
pub const ORDER_SYMBOL: &str = "$ord";

/// Largest ordinal accepted by [`eta`] and friends.
pub const ETA_CAP: usize = 64;

fn cap(alpha: usize) -> Result<()> {
    if alpha > ETA_CAP {
        return Err(Error::SizeCap {
            size: alpha,
            cap: ETA_CAP,
        });
    }
    Ok(())
}

fn companion(var: &str) -> &'static str {
    if var == "y" {
        "x"
    } else {
        "y"
    }
}

/// `η_β(v)` and `η_β(w)` for all `β ≤ alpha`, where `w` is the companion of `v`.
fn eta_table(alpha: usize, var: &str, order: &str) -> (Vec<Formula>, Vec<Formula>) {
    let other = companion(var);
    let mut on_var: Vec<Formula> = Vec::with_capacity(alpha + 1);
    let mut on_other: Vec<Formula> = Vec::with_capacity(alpha + 1);
    for beta in 0..=alpha {
        on_var.push(eta_step(var, other, order, &on_other[..beta]));
        on_other.push(eta_step(other, var, order, &on_var[..beta]));
    }
    (on_var, on_other)
}

/// `η_α(x)` given `η_β(y)` for `β < α`.
fn eta_step(x: &str, y: &str, order: &str, below: &[Formula]) -> Formula {
    let lt = Formula::rel(order, [y, x]);
    let head = Formula::forall(
        y,
        Formula::implies(lt.clone(), Formula::big_or(below.to_vec())),
    );
    if below.is_empty() {
        return head;
    }
    let witnesses = below
        .iter()
        .map(|e| Formula::exists(y, Formula::and(lt.clone(), e.clone())))
        .collect();
    Formula::and(head, Formula::big_and(witnesses))
}

/// `η_α(var)`: exactly `α` elements lie `order`-below `var`, forming a copy
/// of `(α, <)`.
pub fn eta(alpha: usize, var: &str, order: &str) -> Result<Formula> {
    cap(alpha)?;
    Ok(eta_table(alpha, var, order)
        .0
        .pop()
        .expect("alpha + 1 entries"))
}

/// `η′_α`: the structure ordered by `order` is isomorphic to `(α, <)`.
pub fn eta_prime(alpha: usize, order: &str) -> Result<Formula> {
    cap(alpha)?;
    let (_, below) = eta_table(alpha.saturating_sub(1), "x", order);
    let below = if alpha == 0 { Vec::new() } else { below };
    let head = Formula::forall("y", Formula::big_or(below.clone()));
    if below.is_empty() {
        return Ok(head);
    }
    let witnesses = below.into_iter().map(|e| Formula::exists("y", e)).collect();
    Ok(Formula::and(head, Formula::big_and(witnesses)))
}

/// `order` is a strict linear order of the whole domain.
pub fn strict_linear_order(order: &str) -> Formula {
    let lt = |a: &str, b: &str| Formula::rel(order, [a, b]);
    let irreflexive = Formula::forall("x", Formula::not(lt("x", "x")));
    let transitive = Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::forall(
                "z",
                Formula::implies(Formula::and(lt("x", "y"), lt("y", "z")), lt("x", "z")),
            ),
        ),
    );
    let total = Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::big_or(vec![Formula::eq("x", "y"), lt("x", "y"), lt("y", "x")]),
        ),
    );
    Formula::big_and(vec![irreflexive, transitive, total])
}

/// Exactly `n` elements, as a first-order sentence.
pub fn exact_size(n: usize) -> Formula {
    let vars: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut distinct = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            distinct.push(Formula::not(Formula::eq(vars[i].clone(), vars[j].clone())));
        }
    }
    let cover = Formula::forall(
        "w",
        Formula::big_or(vars.iter().map(|v| Formula::eq("w", v.clone())).collect()),
    );
    let mut body = Formula::and(Formula::big_and(distinct), cover);
    for v in vars.iter().rev() {
        body = Formula::exists(v.clone(), body);
    }
    body
}

/// A synthesized sentence over the targets' vocabulary plus `order_symbol/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizingSentence {
    pub targets: Vec<Structure>,
    pub formula: Formula,
    pub order_symbol: String,
}

impl CharacterizingSentence {
    /// The vocabulary the formula is written in.
    pub fn vocabulary(&self, base: &Vocabulary) -> Result<Vocabulary> {
        base.extended(&Vocabulary::new([Symbol::new(
            self.order_symbol.clone(),
            2,
        )])?)
    }
}

/// Every tuple in `{0..n-1}^r`, in lexicographic order.
fn index_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    let total = n.pow(r as u32);
    (0..total)
        .map(|mut i| {
            let mut t = vec![0; r];
            for slot in t.iter_mut().rev() {
                *slot = i % n;
                i /= n;
            }
            t
        })
        .collect()
}

/// `Φ_𝔄` for the enumeration `f` of `a`'s domain: under any order that
/// satisfies `η′_λ`, the `α`-th element must behave like `f(α)` on every
/// relation. Generalizes the binary `ρ_{α,β}` to every arity.
pub fn mcgee_phi(a: &Structure, f: &Bijection, order: &str) -> Result<CharacterizingSentence> {
    let lambda = a.size();
    if lambda == 0 {
        return Err(Error::EmptyDomain);
    }
    cap(lambda)?;
    if f.size() != lambda {
        return Err(Error::DimensionMismatch {
            expected: lambda,
            found: f.size(),
        });
    }
    if a.vocabulary().index_of(order).is_some() {
        return Err(Error::Vocabulary(format!(
            "order symbol `{order}` already in {}",
            a.vocabulary()
        )));
    }
    let mut conjuncts = Vec::new();
    for (sym, rel) in a.vocabulary().symbols().iter().zip(a.relations()) {
        let vars: Vec<String> = (1..=sym.arity).map(|i| format!("x{i}")).collect();
        // η_α(x_i) for every position i and ordinal α < λ.
        let etas: Vec<Vec<Formula>> = vars
            .iter()
            .map(|v| eta_table(lambda - 1, v, order).0)
            .collect();
        let atom = Formula::rel(sym.name.clone(), vars.iter().cloned());
        let mut cases = Vec::new();
        for alphas in index_tuples(lambda, sym.arity) {
            let image: Vec<usize> = alphas.iter().map(|&al| f.apply(al)).collect();
            let rho = if rel.contains(&image) {
                atom.clone()
            } else {
                Formula::not(atom.clone())
            };
            let guard: Vec<Formula> = alphas
                .iter()
                .enumerate()
                .map(|(i, &al)| etas[i][al].clone())
                .collect();
            cases.push(if guard.is_empty() {
                rho
            } else {
                Formula::implies(Formula::big_and(guard), rho)
            });
        }
        let mut body = Formula::big_and(cases);
        for v in vars.iter().rev() {
            body = Formula::forall(v.clone(), body);
        }
        conjuncts.push(body);
    }
    Ok(CharacterizingSentence {
        targets: vec![a.clone()],
        formula: Formula::big_and(conjuncts),
        order_symbol: order.to_string(),
    })
}

/// `Θ_K = ⋁ Φ_𝔄` over the given representatives, each enumerated by the
/// identity. All representatives must share one size and vocabulary.
pub fn theta(representatives: &[Structure], order: &str) -> Result<CharacterizingSentence> {
    let mut disjuncts = Vec::new();
    for rep in representatives {
        if rep.size() != representatives[0].size()
            || rep.vocabulary() != representatives[0].vocabulary()
        {
            return Err(Error::InvalidStructure(
                "representatives differ in size or vocabulary".into(),
            ));
        }
        disjuncts.push(mcgee_phi(rep, &Bijection::identity(rep.size()), order)?.formula);
    }
    Ok(CharacterizingSentence {
        targets: representatives.to_vec(),
        formula: Formula::big_or(disjuncts),
        order_symbol: order.to_string(),
    })
}
