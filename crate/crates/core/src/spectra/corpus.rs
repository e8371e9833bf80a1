//! Sentences and classes used as spectrum examples.
//!
//! `phi_lim` and `phi_suc` are Härtig/Rescher sentences over a linear order
//! whose intended spectra are the limit and successor cardinals. On finite
//! domains every element has an immediate predecessor count, so `phi_lim`
//! has no finite models and `phi_suc` has models of every finite size. Their
//! content is about infinite cardinals; here they exercise the parser and the
//! evaluator.

use crate::definability::{exact_size, strict_linear_order, ProjectionDefinition};
use crate::evaluator::ClassOracle;
use crate::structures::Vocabulary;
use crate::syntax::{parse, Formula};

/// Symbol used for the order in the corpus sentences.
pub const ORDER: &str = "lt";

/// `<` is a strict linear order.
pub fn linear_order(order: &str) -> Formula {
    strict_linear_order(order)
}

/// Linear order without a last "cardinal": above every point there is one
/// with strictly more predecessors.
pub fn phi_lim() -> Formula {
    Formula::and(
        linear_order(ORDER),
        parse("forall x. exists y. lt(x, y) & !J u v. (lt(u, x)) (lt(v, y))")
            .expect("static sentence"),
    )
}

/// Linear order with a point whose successors all have as many predecessors
/// as it does, and which has fewer predecessors than there are elements.
pub fn phi_suc() -> Formula {
    Formula::and(
        linear_order(ORDER),
        parse("exists x. (forall y. (lt(x, y) -> I u v. (lt(u, x)) (lt(v, y)))) & !J u v. (lt(u, x)) (v = v)")
            .expect("static sentence"),
    )
}

/// Exactly `n` elements, as a first-order sentence.
pub fn exactly(n: usize) -> Formula {
    exact_size(n)
}

/// Size in `sizes`, as a disjunction of [`exactly`].
pub fn size_in(sizes: &[usize]) -> Formula {
    Formula::big_or(sizes.iter().map(|&n| exactly(n)).collect())
}

const PAIRING: &str = "(forall x. exists y. S(x, y) & forall z. (S(x, z) -> z = y)) \
                       & (forall x. forall y. (S(x, y) -> S(y, x)))";

/// Even size: a hidden `S` pairs every element with a different one.
pub fn even_pairing() -> ProjectionDefinition {
    let f = parse(&format!("{PAIRING} & (forall x. !S(x, x))")).expect("static sentence");
    ProjectionDefinition::new(
        Vocabulary::empty(),
        Vocabulary::parse("S/2").expect("static"),
        f,
    )
    .expect("well-formed")
}

/// Odd size: a hidden `S` pairs elements up with exactly one fixed point.
pub fn odd_pairing() -> ProjectionDefinition {
    let f = parse(&format!(
        "{PAIRING} & (exists x. S(x, x) & forall y. (S(y, y) -> y = x))"
    ))
    .expect("static sentence");
    ProjectionDefinition::new(
        Vocabulary::empty(),
        Vocabulary::parse("S/2").expect("static"),
        f,
    )
    .expect("well-formed")
}

/// Finite stand-in for the class "limit size and `P` empty, or successor size
/// and `P` nonempty": even sizes play the limit role. An analog, not a
/// transcription.
pub fn parity_p_class() -> ClassOracle {
    ClassOracle::new("parity-P", Vocabulary::parse("P/1").expect("static"), |s| {
        let empty = s.relation("P").is_none_or(|p| p.is_empty());
        (s.size() % 2 == 0) == empty
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::Env;
    use crate::spectra::{spectrum, Target};
    use crate::structures::DEFAULT_BUDGET;

    #[test]
    fn corpus_sentences_parse_and_round_trip() {
        for f in [phi_lim(), phi_suc(), linear_order("lt"), exactly(3)] {
            assert_eq!(parse(&f.to_string()).unwrap(), f);
            assert!(f.is_sentence());
        }
    }

    #[test]
    fn finite_spectra_of_cardinal_sentences() {
        let env = Env::new();
        let lim = spectrum(
            &Target::sentence(phi_lim()).unwrap(),
            4,
            &env,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(lim.realized.is_empty());
        let suc = spectrum(
            &Target::sentence(phi_suc()).unwrap(),
            4,
            &env,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(suc.realized, vec![1, 2, 3, 4]);
        // One model per linear order: n! of them, one class.
        let models: Vec<u128> = suc.counts.iter().map(|c| c.models).collect();
        assert_eq!(models, vec![1, 2, 6, 24]);
    }

    #[test]
    fn pairing_spectra() {
        let env = Env::new();
        let even = spectrum(&Target::Projection(even_pairing()), 5, &env, DEFAULT_BUDGET).unwrap();
        assert_eq!(even.realized, vec![2, 4]);
        let odd = spectrum(&Target::Projection(odd_pairing()), 5, &env, DEFAULT_BUDGET).unwrap();
        assert_eq!(odd.realized, vec![1, 3, 5]);
    }

    #[test]
    fn parity_class_is_closed() {
        assert!(parity_p_class().is_isomorphism_closed(3, 1000).unwrap());
        let r = spectrum(
            &Target::Oracle(parity_p_class()),
            3,
            &Env::new(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(r.realized, vec![1, 2, 3]);
        // Size 2: only P = ∅; size 3: the 7 nonempty subsets.
        assert_eq!(r.counts[1].models, 1);
        assert_eq!(r.counts[2].models, 7);
    }
}
