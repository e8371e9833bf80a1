//! Shared generators for the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use finmod::evaluator::{builtin_class, Env, QInterpretation};
use finmod::structures::{Relation, Structure, Vocabulary};
use finmod::syntax::Formula;

pub const VARS: [&str; 3] = ["x", "y", "z"];

/// `P/1, R/2`.
pub fn vocabulary() -> Vocabulary {
    Vocabulary::parse("P/1, R/2").unwrap()
}

/// `Q` as "at least 2" plus the oracle `nonempty-P` over `{P/1}`.
pub fn env() -> Env {
    Env::new()
        .with_q(QInterpretation::CountThreshold(2))
        .with_oracle(builtin_class("nonempty-P", None).unwrap())
        .unwrap()
}

pub fn structure_from_masks(n: usize, p: u128, r: u128) -> Structure {
    Structure::from_relations(
        vocabulary(),
        n,
        vec![Relation::from_mask(1, n, p), Relation::from_mask(2, n, r)],
    )
    .unwrap()
}

pub fn random_structure<R: Rng>(rng: &mut R, n: usize) -> Structure {
    let p = rng.gen::<u128>() & ((1 << n) - 1);
    let r = rng.gen::<u128>() & ((1 << (n * n)) - 1);
    structure_from_masks(n, p, r)
}

fn var<R: Rng>(rng: &mut R) -> String {
    VARS.choose(rng).unwrap().to_string()
}

/// Node kinds that bind variables; a corpus should exercise every one.
pub const QUANTIFIER_KINDS: [&str; 8] = [
    "exists",
    "forall",
    "count",
    "schematic",
    "hartig",
    "rescher",
    "well-order",
    "oracle",
];

pub fn quantifier_kinds(f: &Formula) -> std::collections::BTreeSet<&'static str> {
    let mut out = std::collections::BTreeSet::new();
    fn walk(f: &Formula, out: &mut std::collections::BTreeSet<&'static str>) {
        use finmod::syntax::Threshold;
        let kind = match f {
            Formula::Exists(..) => Some("exists"),
            Formula::Forall(..) => Some("forall"),
            Formula::CountAtLeast(Threshold::AtLeast(_), ..) => Some("count"),
            Formula::CountAtLeast(Threshold::Schematic, ..) => Some("schematic"),
            Formula::Hartig(..) => Some("hartig"),
            Formula::Rescher(..) => Some("rescher"),
            Formula::WellOrder(..) => Some("well-order"),
            Formula::Oracle(..) => Some("oracle"),
            _ => None,
        };
        out.extend(kind);
        for (c, _) in f.children() {
            walk(c, out);
        }
    }
    walk(f, &mut out);
    out
}

/// A random formula over `P/1, R/2` with variables `x, y, z`.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..5) {
            0 => Formula::rel("P", [var(rng)]),
            1 | 2 => Formula::rel("R", [var(rng), var(rng)]),
            3 => Formula::eq(var(rng), var(rng)),
            _ => {
                if rng.gen() {
                    Formula::True
                } else {
                    Formula::False
                }
            }
        };
    }
    let d = depth - 1;
    let sub = |rng: &mut R| random_formula(rng, d);
    match rng.gen_range(0..14) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::iff(sub(rng), sub(rng)),
        5 => Formula::big_and(vec![sub(rng), sub(rng), sub(rng)]),
        6 => Formula::exists(var(rng), sub(rng)),
        7 => Formula::forall(var(rng), sub(rng)),
        8 => Formula::count(rng.gen_range(1..4), var(rng), sub(rng)),
        9 => Formula::q(var(rng), sub(rng)),
        10 => Formula::hartig(var(rng), var(rng), sub(rng), sub(rng)),
        11 => Formula::rescher(var(rng), var(rng), sub(rng), sub(rng)),
        12 => {
            let x = var(rng);
            let y = loop {
                let y = var(rng);
                if y != x {
                    break y;
                }
            };
            Formula::well_order(x, y, sub(rng))
        }
        _ => Formula::oracle("nonempty-P", [var(rng)], sub(rng)),
    }
}

/// Closes `f` with a random quantifier per free variable.
pub fn random_sentence<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    let f = random_formula(rng, depth);
    f.free_vars()
        .into_iter()
        .fold(f, |acc, v| match rng.gen_range(0..3) {
            0 => Formula::exists(v, acc),
            1 => Formula::forall(v, acc),
            _ => Formula::count(2, v, acc),
        })
}
