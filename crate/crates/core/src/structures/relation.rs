use std::fmt;

use serde::{Deserialize, Serialize};

use crate::structures::Bijection;

/// A set of `arity`-tuples over the domain `{0..domain-1}`, stored as a bitset
/// indexed by the base-`domain` encoding of each tuple (first coordinate most
/// significant).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "RelationRepr", try_from = "RelationRepr")]
pub struct Relation {
    arity: usize,
    domain: usize,
    bits: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RelationRepr {
    arity: usize,
    domain: usize,
    tuples: Vec<Vec<usize>>,
}

impl From<Relation> for RelationRepr {
    fn from(r: Relation) -> Self {
        RelationRepr {
            arity: r.arity,
            domain: r.domain,
            tuples: r.iter().collect(),
        }
    }
}

impl TryFrom<RelationRepr> for Relation {
    type Error = String;

    fn try_from(r: RelationRepr) -> Result<Self, String> {
        Relation::from_tuples(r.arity, r.domain, &r.tuples).ok_or_else(|| {
            format!(
                "tuple out of range for arity {} over {} elements",
                r.arity, r.domain
            )
        })
    }
}

impl Relation {
    pub fn empty(arity: usize, domain: usize) -> Self {
        let slots = slot_count(arity, domain);
        Relation {
            arity,
            domain,
            bits: vec![0; slots.div_ceil(64)],
        }
    }

    pub fn full(arity: usize, domain: usize) -> Self {
        let mut rel = Relation::empty(arity, domain);
        for i in 0..rel.slots() {
            rel.set_index(i, true);
        }
        rel
    }

    pub fn from_tuples<I, T>(arity: usize, domain: usize, tuples: I) -> Option<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        let mut rel = Relation::empty(arity, domain);
        for t in tuples {
            if !rel.insert(t.as_ref()) {
                return None;
            }
        }
        Some(rel)
    }

    /// Builds the relation whose membership bits are the low bits of `mask`.
    pub fn from_mask(arity: usize, domain: usize, mask: u128) -> Self {
        let mut rel = Relation::empty(arity, domain);
        for i in 0..rel.slots().min(128) {
            if mask >> i & 1 == 1 {
                rel.set_index(i, true);
            }
        }
        rel
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    /// Number of candidate tuples, `domain^arity`.
    pub fn slots(&self) -> usize {
        slot_count(self.arity, self.domain)
    }

    pub fn index_of(&self, tuple: &[usize]) -> Option<usize> {
        if tuple.len() != self.arity || tuple.iter().any(|&a| a >= self.domain) {
            return None;
        }
        Some(tuple.iter().fold(0, |acc, &a| acc * self.domain + a))
    }

    pub fn tuple_at(&self, mut index: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.arity];
        for slot in tuple.iter_mut().rev() {
            *slot = index % self.domain;
            index /= self.domain;
        }
        tuple
    }

    #[inline]
    pub fn get_index(&self, index: usize) -> bool {
        self.bits[index / 64] >> (index % 64) & 1 == 1
    }

    #[inline]
    pub fn set_index(&mut self, index: usize, value: bool) {
        let word = &mut self.bits[index / 64];
        if value {
            *word |= 1 << (index % 64);
        } else {
            *word &= !(1 << (index % 64));
        }
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.index_of(tuple).is_some_and(|i| self.get_index(i))
    }

    /// Inserts a tuple; returns false if it is malformed for this relation.
    pub fn insert(&mut self, tuple: &[usize]) -> bool {
        match self.index_of(tuple) {
            Some(i) => {
                self.set_index(i, true);
                true
            }
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.slots())
            .filter(|&i| self.get_index(i))
            .map(|i| self.tuple_at(i))
    }

    /// Membership bits as an integer; only meaningful when `slots() <= 128`.
    pub fn mask(&self) -> u128 {
        (0..self.slots().min(128))
            .filter(|&i| self.get_index(i))
            .fold(0u128, |acc, i| acc | 1 << i)
    }

    /// Pointwise image `π″A`.
    pub fn image(&self, pi: &Bijection) -> Relation {
        let mut out = Relation::empty(self.arity, self.domain);
        let n = self.domain;
        for (w, &word) in self.bits.iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                let mut index = w * 64 + rest.trailing_zeros() as usize;
                rest &= rest - 1;
                // Map each base-n digit in place.
                let (mut mapped, mut place) = (0, 1);
                for _ in 0..self.arity {
                    mapped += pi.apply(index % n) * place;
                    place *= n;
                    index /= n;
                }
                out.set_index(mapped, true);
            }
        }
        out
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &Relation) -> Relation {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn complement(&self) -> Relation {
        let mut out = Relation::empty(self.arity, self.domain);
        for i in 0..self.slots() {
            out.set_index(i, !self.get_index(i));
        }
        out
    }

    fn zip_with(&self, other: &Relation, op: impl Fn(u64, u64) -> u64) -> Relation {
        assert_eq!(
            (self.arity, self.domain),
            (other.arity, other.domain),
            "relation shape mismatch"
        );
        Relation {
            arity: self.arity,
            domain: self.domain,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }

    /// Advances the membership bitmask as a binary counter. Returns false (and
    /// leaves the relation empty) on wrap-around.
    pub(crate) fn increment(&mut self) -> bool {
        for i in 0..self.slots() {
            if self.get_index(i) {
                self.set_index(i, false);
            } else {
                self.set_index(i, true);
                return true;
            }
        }
        false
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub(crate) fn slot_count(arity: usize, domain: usize) -> usize {
    domain.pow(arity as u32)
}

/// Writes a tuple set as `(a,b); (c,d)`.
pub fn format_tuples(rel: &Relation) -> String {
    rel.iter()
        .map(|t| {
            let parts: Vec<String> = t.iter().map(usize::to_string).collect();
            format!("({})", parts.join(","))
        })
        .collect::<Vec<_>>()
        .join("; ")
}
