use itertools::Itertools;

use crate::error::{Error, Result};
use crate::structures::{
    apply_bijection, enumerate_structures, Bijection, Relation, Structure, Vocabulary,
};

/// All permutations of `{0..n-1}` in lexicographic order (identity first).
pub fn permutations(n: usize) -> Vec<Bijection> {
    (0..n)
        .permutations(n)
        .map(|map| Bijection::new(map).expect("itertools yields permutations"))
        .collect()
}

/// Per-element invariant: for every symbol and argument position, how many
/// tuples carry the element there, plus how many tuples are constant on it.
fn signatures(s: &Structure) -> Vec<Vec<usize>> {
    let n = s.size();
    let width: usize = s.relations().iter().map(|r| r.arity() + 1).sum();
    let mut sig = vec![vec![0; width]; n];
    let mut offset = 0;
    for rel in s.relations() {
        for t in rel.iter() {
            for (pos, &a) in t.iter().enumerate() {
                sig[a][offset + pos] += 1;
            }
            if let Some(&first) = t.first() {
                if t.iter().all(|&a| a == first) {
                    sig[first][offset + rel.arity()] += 1;
                }
            }
        }
        offset += rel.arity() + 1;
    }
    sig
}

/// Searches for `π` with `π(a) = b`.
///
/// Candidates are pruned by degree signatures and partial-consistency checks;
/// any returned witness has been verified by recomputing the image.
pub fn is_isomorphic(a: &Structure, b: &Structure) -> Result<Option<Bijection>> {
    if a.vocabulary() != b.vocabulary() {
        return Err(Error::Vocabulary(format!(
            "cannot compare structures over {} and {}",
            a.vocabulary(),
            b.vocabulary()
        )));
    }
    if a.size() != b.size() {
        return Ok(None);
    }
    if a.relations()
        .iter()
        .zip(b.relations())
        .any(|(r, t)| r.len() != t.len())
    {
        return Ok(None);
    }
    let sig_a = signatures(a);
    let sig_b = signatures(b);
    let mut sorted_a = sig_a.clone();
    let mut sorted_b = sig_b.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return Ok(None);
    }

    let n = a.size();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(a, b, &sig_a, &sig_b, 0, &mut map, &mut used) {
        let pi = Bijection::new(map).expect("search builds a permutation");
        debug_assert_eq!(apply_bijection(a, &pi).as_ref().ok(), Some(b));
        if apply_bijection(a, &pi)? == *b {
            return Ok(Some(pi));
        }
    }
    Ok(None)
}

fn extend(
    a: &Structure,
    b: &Structure,
    sig_a: &[Vec<usize>],
    sig_b: &[Vec<usize>],
    next: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if next == a.size() {
        return true;
    }
    for cand in 0..b.size() {
        if used[cand] || sig_a[next] != sig_b[cand] {
            continue;
        }
        map[next] = cand;
        used[cand] = true;
        if consistent(a, b, next, map) && extend(a, b, sig_a, sig_b, next + 1, map, used) {
            return true;
        }
        used[cand] = false;
        map[next] = usize::MAX;
    }
    false
}

/// Checks every tuple over `{0..=last}` that mentions `last`.
fn consistent(a: &Structure, b: &Structure, last: usize, map: &[usize]) -> bool {
    for (ra, rb) in a.relations().iter().zip(b.relations()) {
        let k = ra.arity();
        if k == 0 {
            if ra.contains(&[]) != rb.contains(&[]) {
                return false;
            }
            continue;
        }
        let prefix = Relation::empty(k, last + 1);
        for i in 0..prefix.slots() {
            let t = prefix.tuple_at(i);
            if !t.contains(&last) {
                continue;
            }
            let image: Vec<usize> = t.iter().map(|&x| map[x]).collect();
            if ra.contains(&t) != rb.contains(&image) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least image of `s` over all permutations, used as a
/// complete isomorphism invariant. Cost is `n!` images, fine for `n <= 6`.
pub fn canonical_key(s: &Structure) -> Vec<Relation> {
    canonical_key_with(s, &permutations(s.size()))
}

/// [`canonical_key`] with the permutations of the domain precomputed.
pub(crate) fn canonical_key_with(s: &Structure, perms: &[Bijection]) -> Vec<Relation> {
    perms
        .iter()
        .map(|pi| {
            s.relations()
                .iter()
                .map(|r| r.image(pi))
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default()
}

pub fn canonical_form(s: &Structure) -> Structure {
    Structure::from_relations(s.vocabulary().clone(), s.size(), canonical_key(s))
        .expect("images keep the shape")
}

#[derive(Debug, Clone)]
pub struct IsomorphismClass {
    /// First member in enumeration order.
    pub representative: Structure,
    pub members: Vec<Structure>,
}

/// Partitions all size-`n` structures over `v` into isomorphism classes, in
/// order of each class's first appearance in the enumeration.
pub fn isomorphism_classes(
    v: &Vocabulary,
    n: usize,
    budget: u128,
) -> Result<Vec<IsomorphismClass>> {
    let mut classes: Vec<IsomorphismClass> = Vec::new();
    let mut index: std::collections::HashMap<Vec<Relation>, usize> = Default::default();
    let perms = permutations(n);
    for s in enumerate_structures(v, n, budget)? {
        let key = canonical_key_with(&s, &perms);
        match index.get(&key) {
            Some(&i) => classes[i].members.push(s),
            None => {
                index.insert(key, classes.len());
                classes.push(IsomorphismClass {
                    representative: s.clone(),
                    members: vec![s],
                });
            }
        }
    }
    Ok(classes)
}
