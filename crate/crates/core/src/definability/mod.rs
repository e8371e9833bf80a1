//! Characterizing sentences and definability by projection.
//!
//! A projection definition `(L, L′, φ)` accepts a structure over `L′` when
//! some expansion to `L` satisfies `φ` (the Σ reading) or, for the universal
//! reading, when every expansion does. Expansion search is exact: it fixes
//! the hidden tuples one at a time and prunes with three-valued evaluation.

mod scott;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{search_completion, ClassOracle, CompiledFormula, Env};
use crate::structures::{enumerate_structures, isomorphism_classes, Structure, Symbol, Vocabulary};
use crate::syntax::{check_wf, Formula};

pub use scott::{
    eta, eta_prime, exact_size, mcgee_phi, strict_linear_order, theta, CharacterizingSentence,
    ETA_CAP, ORDER_SYMBOL,
};

/// How a projection definition quantifies its hidden symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    /// Some expansion satisfies the sentence.
    Existential,
    /// Every expansion satisfies the sentence.
    Universal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDefinition {
    /// Visible symbols first, then hidden ones.
    full: Vocabulary,
    visible: Vocabulary,
    sentence: Formula,
    reading: Reading,
}

impl ProjectionDefinition {
    pub fn new(visible: Vocabulary, hidden: Vocabulary, sentence: Formula) -> Result<Self> {
        Self::with_reading(visible, hidden, sentence, Reading::Existential)
    }

    pub fn with_reading(
        visible: Vocabulary,
        hidden: Vocabulary,
        sentence: Formula,
        reading: Reading,
    ) -> Result<Self> {
        let full = visible.extended(&hidden)?;
        if let Some(v) = check_wf(&sentence, &full, &[]).into_iter().next() {
            return Err(Error::IllFormed(v.to_string()));
        }
        Ok(ProjectionDefinition {
            full,
            visible,
            sentence,
            reading,
        })
    }

    pub fn full_vocabulary(&self) -> &Vocabulary {
        &self.full
    }

    pub fn visible_vocabulary(&self) -> &Vocabulary {
        &self.visible
    }

    pub fn hidden_vocabulary(&self) -> Vocabulary {
        Vocabulary::new(self.full.symbols()[self.visible.len()..].iter().cloned())
            .expect("subset of a vocabulary")
    }

    pub fn sentence(&self) -> &Formula {
        &self.sentence
    }

    pub fn reading(&self) -> Reading {
        self.reading
    }

    /// Compiles the sentence once for repeated membership queries.
    pub fn checker(&self, env: &Env) -> Result<SigmaChecker<'_>> {
        let target = match self.reading {
            Reading::Existential => self.sentence.clone(),
            Reading::Universal => Formula::not(self.sentence.clone()),
        };
        Ok(SigmaChecker {
            def: self,
            compiled: CompiledFormula::compile(&target, &self.full, env, &[])?,
        })
    }
}

pub struct SigmaChecker<'a> {
    def: &'a ProjectionDefinition,
    compiled: CompiledFormula,
}

impl SigmaChecker<'_> {
    /// Membership of `s`; `budget` bounds the search steps.
    pub fn accepts(&self, s: &Structure, budget: u128) -> Result<bool> {
        Ok(self.witness(s, budget)?.is_some() == (self.def.reading == Reading::Existential))
    }

    /// An expansion satisfying the sentence (existential reading) or
    /// falsifying it (universal reading), if one exists.
    pub fn witness(&self, s: &Structure, budget: u128) -> Result<Option<Structure>> {
        if s.vocabulary() != &self.def.visible {
            return Err(Error::Vocabulary(format!(
                "definition expects {}, structure is over {}",
                self.def.visible,
                s.vocabulary()
            )));
        }
        let mut relations = s.relations().to_vec();
        let hidden: Vec<usize> = (self.def.visible.len()..self.def.full.len()).collect();
        for sym in &self.def.full.symbols()[self.def.visible.len()..] {
            relations.push(crate::structures::Relation::empty(sym.arity, s.size()));
        }
        let mut expanded = Structure::from_relations(self.def.full.clone(), s.size(), relations)?;
        if hidden.is_empty() {
            return Ok(self.compiled.eval(&expanded)?.then_some(expanded));
        }
        Ok(search_completion(&self.compiled, &mut expanded, &hidden, budget)?.then_some(expanded))
    }
}

/// Σ membership: some expansion of `s` satisfies `d`'s sentence. For a
/// definition with the universal reading, every expansion must.
pub fn sigma_membership(
    d: &ProjectionDefinition,
    s: &Structure,
    env: &Env,
    budget: u128,
) -> Result<bool> {
    d.checker(env)?.accepts(s, budget)
}

/// Definitions of a class at one size, from its isomorphism classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDefinition {
    pub size: usize,
    /// `∃< (η′_λ ∧ Θ_K)`.
    pub positive: ProjectionDefinition,
    /// `∀< (η′_λ → Θ_K)` with `Θ_K` over every member on `{0..λ-1}`,
    /// accepting the same size-`λ` structures.
    pub universal: ProjectionDefinition,
    /// `∃< (η′_λ ∧ Θ_{non-members})`, the complement at size `λ`.
    pub negative: ProjectionDefinition,
    pub member_classes: usize,
    pub non_member_classes: usize,
}

/// Defines `K` restricted to size `lambda` by a disjunction of characterizing
/// sentences, one per isomorphism class of members (and of non-members for
/// the complementary definition).
pub fn define_class_at_size(
    k: &ClassOracle,
    lambda: usize,
    budget: u128,
) -> Result<ClassDefinition> {
    let v = k.vocabulary();
    let mut members = Vec::new();
    let mut others = Vec::new();
    let mut all_members = Vec::new();
    for class in isomorphism_classes(v, lambda, budget)? {
        let verdict = k.contains(&class.representative);
        if let Some(bad) = class.members.iter().find(|m| k.contains(m) != verdict) {
            return Err(Error::NotIsomorphismClosed {
                name: k.name().to_string(),
                detail: format!(
                    "membership differs between isomorphic structures\n{}and\n{}",
                    class.representative, bad
                ),
            });
        }
        if verdict {
            all_members.extend(class.members.iter().cloned());
            members.push(class.representative);
        } else {
            others.push(class.representative);
        }
    }
    let order = Vocabulary::new([Symbol::new(ORDER_SYMBOL, 2)])?;
    // η′_λ pins the order down only when it is linear.
    let eta = Formula::and(
        strict_linear_order(ORDER_SYMBOL),
        eta_prime(lambda, ORDER_SYMBOL)?,
    );
    let theta_k = theta(&members, ORDER_SYMBOL)?.formula;
    let theta_not = theta(&others, ORDER_SYMBOL)?.formula;
    // Under "every order" each labelled copy must have its own disjunct; one
    // representative per class only serves the existential reading.
    let theta_labelled = theta(&all_members, ORDER_SYMBOL)?.formula;
    Ok(ClassDefinition {
        size: lambda,
        positive: ProjectionDefinition::new(
            v.clone(),
            order.clone(),
            Formula::and(eta.clone(), theta_k.clone()),
        )?,
        universal: ProjectionDefinition::with_reading(
            v.clone(),
            order.clone(),
            // Off size λ no linear order satisfies η′_λ, so the implication
            // alone would hold vacuously there.
            Formula::and(
                exact_size(lambda),
                Formula::implies(eta.clone(), theta_labelled),
            ),
            Reading::Universal,
        )?,
        negative: ProjectionDefinition::new(v.clone(), order, Formula::and(eta, theta_not))?,
        member_classes: members.len(),
        non_member_classes: others.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaViolation {
    pub structure: Structure,
    /// True when both definitions accept, false when neither does.
    pub accepted_by_both: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub max_size: usize,
    pub certified: bool,
    pub checked: u64,
    pub violation_count: u64,
    /// The first violations in enumeration order, at most [`DELTA_LISTED`].
    pub violations: Vec<DeltaViolation>,
}

/// Violations listed in a [`DeltaReport`]; the rest are only counted.
pub const DELTA_LISTED: usize = 64;

/// Checks that exactly one of `pos`, `neg` accepts each structure of size
/// `1..=max_size`.
pub fn delta_check(
    pos: &ProjectionDefinition,
    neg: &ProjectionDefinition,
    max_size: usize,
    env: &Env,
    budget: u128,
) -> Result<DeltaReport> {
    if pos.visible != neg.visible {
        return Err(Error::Vocabulary(format!(
            "visible vocabularies differ: {} and {}",
            pos.visible, neg.visible
        )));
    }
    let (p, q) = (pos.checker(env)?, neg.checker(env)?);
    let mut report = DeltaReport {
        max_size,
        certified: true,
        checked: 0,
        violation_count: 0,
        violations: Vec::new(),
    };
    for n in 1..=max_size {
        for s in enumerate_structures(&pos.visible, n, budget)? {
            report.checked += 1;
            let (a, b) = (p.accepts(&s, budget)?, q.accepts(&s, budget)?);
            if a == b {
                report.certified = false;
                report.violation_count += 1;
                if report.violations.len() < DELTA_LISTED {
                    report.violations.push(DeltaViolation {
                        structure: s,
                        accepted_by_both: a,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::{builtin_class, eval_sentence};
    use crate::structures::{is_isomorphic, Bijection, DEFAULT_BUDGET};
    use crate::syntax::parse;

    fn unary() -> Vocabulary {
        Vocabulary::parse("P/1").unwrap()
    }

    #[test]
    fn mcgee_phi_pins_down_the_target() {
        let v = Vocabulary::parse("R/2").unwrap();
        let a = Structure::new(v.clone(), 2, &[("R", &[&[0, 1]])]).unwrap();
        let phi = mcgee_phi(&a, &Bijection::identity(2), ORDER_SYMBOL).unwrap();
        let order = Vocabulary::new([Symbol::new(ORDER_SYMBOL, 2)]).unwrap();
        let d = ProjectionDefinition::new(
            v.clone(),
            order,
            Formula::and(eta_prime(2, ORDER_SYMBOL).unwrap(), phi.formula),
        )
        .unwrap();
        let mut accepted = 0;
        for s in enumerate_structures(&v, 2, 100).unwrap() {
            let yes = sigma_membership(&d, &s, &Env::new(), DEFAULT_BUDGET).unwrap();
            assert_eq!(yes, is_isomorphic(&s, &a).unwrap().is_some());
            accepted += yes as usize;
        }
        assert_eq!(accepted, 2);
    }

    #[test]
    fn size_one_phi_is_the_atomic_diagram() {
        let v = Vocabulary::parse("P/1, R/2").unwrap();
        let a = Structure::new(v.clone(), 1, &[("P", &[&[0]])]).unwrap();
        let phi = mcgee_phi(&a, &Bijection::identity(1), ORDER_SYMBOL).unwrap();
        let d = ProjectionDefinition::new(
            v.clone(),
            Vocabulary::new([Symbol::new(ORDER_SYMBOL, 2)]).unwrap(),
            Formula::and(eta_prime(1, ORDER_SYMBOL).unwrap(), phi.formula),
        )
        .unwrap();
        for s in enumerate_structures(&v, 1, 100).unwrap() {
            let same = s == a;
            assert_eq!(sigma_membership(&d, &s, &Env::new(), 1000).unwrap(), same);
        }
    }

    #[test]
    fn class_definitions_match_membership() {
        for name in ["even-P", "all", "empty", "nonempty-P"] {
            let k = builtin_class(name, None).unwrap();
            let def = define_class_at_size(&k, 2, DEFAULT_BUDGET).unwrap();
            let (p, u, n) = (
                def.positive.checker(&Env::new()).unwrap(),
                def.universal.checker(&Env::new()).unwrap(),
                def.negative.checker(&Env::new()).unwrap(),
            );
            for s in enumerate_structures(&unary(), 2, 100).unwrap() {
                let m = k.contains(&s);
                assert_eq!(p.accepts(&s, DEFAULT_BUDGET).unwrap(), m, "{name}");
                assert_eq!(u.accepts(&s, DEFAULT_BUDGET).unwrap(), m, "{name}");
                assert_eq!(n.accepts(&s, DEFAULT_BUDGET).unwrap(), !m, "{name}");
            }
        }
    }

    #[test]
    fn all_structures_at_size_two() {
        let v = Vocabulary::parse("R/2").unwrap();
        let k = builtin_class("all", Some(&v)).unwrap();
        let def = define_class_at_size(&k, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(def.member_classes, 10);
        let c = def.positive.checker(&Env::new()).unwrap();
        assert!(enumerate_structures(&v, 2, 100)
            .unwrap()
            .all(|s| c.accepts(&s, DEFAULT_BUDGET).unwrap()));
    }

    #[test]
    fn empty_class_is_false() {
        let k = builtin_class("empty", None).unwrap();
        let def = define_class_at_size(&k, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(def.member_classes, 0);
        assert!(matches!(def.positive.sentence(), Formula::And(_, b) if **b == Formula::False));
    }

    #[test]
    fn non_closed_oracle_is_rejected() {
        let k = ClassOracle::new("zero-in-P", unary(), |s| {
            s.relation("P").unwrap().contains(&[0])
        });
        assert!(matches!(
            define_class_at_size(&k, 2, DEFAULT_BUDGET),
            Err(Error::NotIsomorphismClosed { .. })
        ));
    }

    #[test]
    fn hidden_witnesses() {
        let d = ProjectionDefinition::new(
            unary(),
            Vocabulary::parse("S/1").unwrap(),
            parse("exists x. S(x) & P(x)").unwrap(),
        )
        .unwrap();
        let s = Structure::new(unary(), 2, &[("P", &[&[0]])]).unwrap();
        let w = d
            .checker(&Env::new())
            .unwrap()
            .witness(&s, 1000)
            .unwrap()
            .unwrap();
        assert!(w.relation("S").unwrap().contains(&[0]));
    }

    #[test]
    fn no_hidden_symbols_is_plain_evaluation() {
        let f = parse("exists x. P(x)").unwrap();
        let d = ProjectionDefinition::new(unary(), Vocabulary::empty(), f.clone()).unwrap();
        for n in 1..=3 {
            for s in enumerate_structures(&unary(), n, 100).unwrap() {
                assert_eq!(
                    sigma_membership(&d, &s, &Env::new(), 10).unwrap(),
                    eval_sentence(&s, &f, &Env::new()).unwrap()
                );
            }
        }
    }

    #[test]
    fn delta_pairs() {
        let pos = ProjectionDefinition::new(
            unary(),
            Vocabulary::empty(),
            parse("exists x. P(x)").unwrap(),
        )
        .unwrap();
        let neg = ProjectionDefinition::new(
            unary(),
            Vocabulary::empty(),
            parse("forall x. !P(x)").unwrap(),
        )
        .unwrap();
        let r = delta_check(&pos, &neg, 3, &Env::new(), DEFAULT_BUDGET).unwrap();
        assert!(r.certified);
        assert_eq!(r.checked, 2 + 4 + 8);
        let r = delta_check(&pos, &pos, 3, &Env::new(), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.violation_count, 14);
    }
}
