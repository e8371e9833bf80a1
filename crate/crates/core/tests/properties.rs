mod common;

use proptest::prelude::*;

use finmod::evaluator::{eval_assignment, eval_sentence, Env};
use finmod::structures::{apply_bijection, is_isomorphic, Bijection, Structure};
use finmod::syntax::{parse, render, Formula};

use common::{env, structure_from_masks};

fn var() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "z"]).prop_map(String::from)
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        var().prop_map(|v| Formula::rel("P", [v])),
        (var(), var()).prop_map(|(a, b)| Formula::rel("R", [a, b])),
        (var(), var()).prop_map(|(a, b)| Formula::eq(a, b)),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::big_and),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::big_or),
            (var(), inner.clone()).prop_map(|(v, f)| Formula::exists(v, f)),
            (var(), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
            (1u32..4, var(), inner.clone()).prop_map(|(k, v, f)| Formula::count(k, v, f)),
            (var(), inner.clone()).prop_map(|(v, f)| Formula::q(v, f)),
            (var(), var(), inner.clone(), inner.clone())
                .prop_map(|(x, y, a, b)| Formula::hartig(x, y, a, b)),
            (var(), var(), inner.clone(), inner.clone())
                .prop_map(|(x, y, a, b)| Formula::rescher(x, y, a, b)),
            (var(), var(), inner.clone()).prop_map(|(x, y, f)| Formula::well_order(x, y, f)),
            (var(), inner).prop_map(|(v, f)| Formula::oracle("nonempty-P", [v], f)),
        ]
    })
}

/// Size 1..=3 structure over `P/1, R/2`.
fn structure() -> impl Strategy<Value = Structure> {
    (1usize..=3).prop_flat_map(|n| {
        (Just(n), 0u128..1 << n, 0u128..1 << (n * n))
            .prop_map(|(n, p, r)| structure_from_masks(n, p, r))
    })
}

fn with_permutation() -> impl Strategy<Value = (Structure, Bijection)> {
    structure().prop_flat_map(|s| {
        let n = s.size();
        (Just(s), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|(s, map)| (s, Bijection::new(map).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn render_then_parse_is_identity(f in formula()) {
        let text = render(&f);
        prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn images_compose((s, pi) in with_permutation(), sigma_seed in any::<u64>()) {
        let n = s.size();
        let mut map: Vec<usize> = (0..n).collect();
        map.rotate_left(sigma_seed as usize % n);
        let sigma = Bijection::new(map).unwrap();
        let twice = apply_bijection(&apply_bijection(&s, &pi).unwrap(), &sigma).unwrap();
        prop_assert_eq!(&twice, &apply_bijection(&s, &sigma.compose(&pi)).unwrap());
        let back = apply_bijection(&apply_bijection(&s, &pi).unwrap(), &pi.inverse()).unwrap();
        prop_assert_eq!(&back, &s);
        let image = apply_bijection(&s, &pi).unwrap();
        prop_assert!(is_isomorphic(&s, &image).unwrap().is_some());
    }

    #[test]
    fn truth_is_isomorphism_invariant(f in formula(), (s, pi) in with_permutation()) {
        let f = f.universal_closure();
        let env = env();
        let image = apply_bijection(&s, &pi).unwrap();
        prop_assert_eq!(eval_sentence(&s, &f, &env).unwrap(), eval_sentence(&image, &f, &env).unwrap());
    }

    #[test]
    fn hartig_is_two_sided_rescher(a in formula(), b in formula(), s in structure()) {
        // Bodies with `u` (resp. `v`) as their only free variable.
        let unary = |f: Formula, to: &str| Formula::forall("y", Formula::forall("z", f)).substitute("x", to);
        let (a, b) = (unary(a, "u"), unary(b, "v"));
        let env = env();
        let i = Formula::hartig("u", "v", a.clone(), b.clone());
        let jj = Formula::and(
            Formula::rescher("u", "v", a.clone(), b.clone()),
            Formula::rescher("v", "u", b, a),
        );
        prop_assert_eq!(eval_sentence(&s, &i, &env).unwrap(), eval_sentence(&s, &jj, &env).unwrap());
    }

    #[test]
    fn count_one_is_exists(f in formula(), s in structure()) {
        let env = env();
        let body = Formula::forall("y", Formula::forall("z", f));
        let c = Formula::count(1, "x", body.clone());
        let e = Formula::exists("x", body);
        prop_assert_eq!(eval_sentence(&s, &c, &env).unwrap(), eval_sentence(&s, &e, &env).unwrap());
    }

    #[test]
    fn well_order_matches_brute_force(f in formula(), s in structure()) {
        let env = env();
        let body = Formula::forall("z", f);
        let w = Formula::well_order("x", "y", body.clone());
        let n = s.size();
        let rel = |a: usize, b: usize| eval_assignment(&s, &body, &["x", "y"], &[a, b], &env).unwrap();
        let mut linear = true;
        for a in 0..n {
            linear &= !rel(a, a);
            for b in 0..n {
                if a != b {
                    linear &= rel(a, b) != rel(b, a);
                }
                for c in 0..n {
                    linear &= !(rel(a, b) && rel(b, c)) || rel(a, c);
                }
            }
        }
        prop_assert_eq!(eval_sentence(&s, &w, &env).unwrap(), linear);
    }
}

#[test]
fn env_without_q_rejects_schematic_quantifier() {
    let s = structure_from_masks(1, 1, 0);
    let f = parse("Q x. P(x)").unwrap();
    assert!(eval_sentence(&s, &f, &Env::new()).is_err());
}
