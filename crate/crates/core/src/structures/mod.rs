//! Finite relational structures over canonical domains `{0..n-1}`.
//!
//! Everything here is immutable once built. Enumeration is deterministic:
//! symbols are visited in vocabulary order with the first symbol varying
//! slowest, and each relation counts through its membership bitmask (tuple
//! index `i` is bit `i`, tuples indexed lexicographically).

mod enumerate;
mod iso;
mod relation;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use enumerate::check_budget;
pub use enumerate::{
    enumerate_structures, expansions, structure_count, StructureCursor, StructureIter,
};
pub(crate) use iso::canonical_key_with;
pub use iso::{
    canonical_form, canonical_key, is_isomorphic, isomorphism_classes, permutations,
    IsomorphismClass,
};
pub use relation::{format_tuples, Relation};
pub(crate) use text::take_tuple;
pub use text::{parse_structure, render_structure};

/// Default cap on structure visits for exhaustive scans.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// An ordered list of relation symbols with unique names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Symbol>", into = "Vec<Symbol>")]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
}

impl Vocabulary {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Result<Self> {
        let symbols: Vec<Symbol> = symbols.into_iter().collect();
        for (i, s) in symbols.iter().enumerate() {
            if s.name.is_empty() {
                return Err(Error::Vocabulary("empty symbol name".into()));
            }
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::Vocabulary(format!("duplicate symbol `{}`", s.name)));
            }
        }
        Ok(Vocabulary { symbols })
    }

    pub fn empty() -> Self {
        Vocabulary::default()
    }

    /// Parses `P/1, R/2` style lists.
    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, arity) = part
                .split_once('/')
                .ok_or_else(|| Error::Vocabulary(format!("expected NAME/ARITY, found `{part}`")))?;
            let arity = arity
                .trim()
                .parse()
                .map_err(|_| Error::Vocabulary(format!("bad arity in `{part}`")))?;
            symbols.push(Symbol::new(name.trim(), arity));
        }
        Vocabulary::new(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.symbols[i].arity)
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.symbols.contains(symbol)
    }

    pub fn is_subset_of(&self, other: &Vocabulary) -> bool {
        self.symbols.iter().all(|s| other.contains(s))
    }

    pub fn is_disjoint(&self, other: &Vocabulary) -> bool {
        self.symbols
            .iter()
            .all(|s| other.index_of(&s.name).is_none())
    }

    /// Concatenation; fails on a name clash.
    pub fn extended(&self, extra: &Vocabulary) -> Result<Vocabulary> {
        Vocabulary::new(self.symbols.iter().chain(extra.symbols.iter()).cloned())
    }
}

impl TryFrom<Vec<Symbol>> for Vocabulary {
    type Error = Error;

    fn try_from(symbols: Vec<Symbol>) -> Result<Self> {
        Vocabulary::new(symbols)
    }
}

impl From<Vocabulary> for Vec<Symbol> {
    fn from(v: Vocabulary) -> Self {
        v.symbols
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(Symbol::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A finite relational structure with domain `{0..size-1}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "StructureRepr", try_from = "StructureRepr")]
pub struct Structure {
    vocabulary: Arc<Vocabulary>,
    size: usize,
    relations: Vec<Relation>,
}

#[derive(Serialize, Deserialize)]
struct StructureRepr {
    size: usize,
    relations: Vec<RelationRepr>,
}

#[derive(Serialize, Deserialize)]
struct RelationRepr {
    name: String,
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

impl From<Structure> for StructureRepr {
    fn from(s: Structure) -> Self {
        StructureRepr {
            size: s.size,
            relations: s
                .vocabulary
                .symbols()
                .iter()
                .zip(&s.relations)
                .map(|(sym, rel)| RelationRepr {
                    name: sym.name.clone(),
                    arity: sym.arity,
                    tuples: rel.iter().collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<StructureRepr> for Structure {
    type Error = Error;

    fn try_from(r: StructureRepr) -> Result<Self> {
        let v = Vocabulary::new(
            r.relations
                .iter()
                .map(|x| Symbol::new(x.name.clone(), x.arity)),
        )?;
        let mut s = Structure::empty(v, r.size);
        for rel in &r.relations {
            for t in &rel.tuples {
                s.insert(&rel.name, t)?;
            }
        }
        Ok(s)
    }
}

impl Structure {
    /// The structure interpreting every symbol as the empty relation.
    pub fn empty(vocabulary: Vocabulary, size: usize) -> Self {
        Structure::empty_shared(Arc::new(vocabulary), size)
    }

    pub(crate) fn empty_shared(vocabulary: Arc<Vocabulary>, size: usize) -> Self {
        let relations = vocabulary
            .symbols()
            .iter()
            .map(|s| Relation::empty(s.arity, size))
            .collect();
        Structure {
            vocabulary,
            size,
            relations,
        }
    }

    /// Builds a structure from explicit tuple lists. Symbols missing from
    /// `interpretations` are empty; unknown names and malformed tuples are errors.
    pub fn new(
        vocabulary: Vocabulary,
        size: usize,
        interpretations: &[(&str, &[&[usize]])],
    ) -> Result<Self> {
        let mut s = Structure::empty(vocabulary, size);
        for (name, tuples) in interpretations {
            for t in tuples.iter() {
                s.insert(name, t)?;
            }
        }
        Ok(s)
    }

    pub fn from_relations(
        vocabulary: Vocabulary,
        size: usize,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        if relations.len() != vocabulary.len() {
            return Err(Error::InvalidStructure(format!(
                "{} interpretations for {} symbols",
                relations.len(),
                vocabulary.len()
            )));
        }
        for (sym, rel) in vocabulary.symbols().iter().zip(&relations) {
            if rel.arity() != sym.arity || rel.domain() != size {
                return Err(Error::InvalidStructure(format!(
                    "interpretation of {sym} has arity {} over domain {}",
                    rel.arity(),
                    rel.domain()
                )));
            }
        }
        Ok(Structure {
            vocabulary: Arc::new(vocabulary),
            size,
            relations,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub(crate) fn shared_vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocabulary
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.vocabulary.index_of(name).map(|i| &self.relations[i])
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub(crate) fn relations_mut(&mut self) -> &mut [Relation] {
        &mut self.relations
    }

    pub fn insert(&mut self, name: &str, tuple: &[usize]) -> Result<()> {
        let i = self.vocabulary.index_of(name).ok_or_else(|| {
            Error::Vocabulary(format!("symbol `{name}` not in {}", self.vocabulary))
        })?;
        if !self.relations[i].insert(tuple) {
            return Err(Error::InvalidStructure(format!(
                "tuple {tuple:?} does not fit {}/{} over a domain of size {}",
                name,
                self.vocabulary.symbols()[i].arity,
                self.size
            )));
        }
        Ok(())
    }

    pub fn set_relation(&mut self, name: &str, rel: Relation) -> Result<()> {
        let i = self.vocabulary.index_of(name).ok_or_else(|| {
            Error::Vocabulary(format!("symbol `{name}` not in {}", self.vocabulary))
        })?;
        if rel.arity() != self.vocabulary.symbols()[i].arity || rel.domain() != self.size {
            return Err(Error::InvalidStructure(format!(
                "relation shape does not fit `{name}`"
            )));
        }
        self.relations[i] = rel;
        Ok(())
    }

    /// Total number of membership bits across all interpretations.
    pub fn bit_width(&self) -> usize {
        self.relations.iter().map(Relation::slots).sum()
    }

    /// Interpretations as sorted tuple lists keyed by symbol name.
    pub fn interpretations(&self) -> BTreeMap<String, Vec<Vec<usize>>> {
        self.vocabulary
            .symbols()
            .iter()
            .zip(&self.relations)
            .map(|(s, r)| (s.name.clone(), r.iter().collect()))
            .collect()
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Structure");
        d.field("size", &self.size);
        for (s, r) in self.vocabulary.symbols().iter().zip(&self.relations) {
            d.field(&s.name, r);
        }
        d.finish()
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_structure(self))
    }
}

/// A permutation of `{0..n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Bijection {
    map: Vec<usize>,
}

impl Bijection {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &a in &map {
            if a >= n || std::mem::replace(&mut seen[a], true) {
                return Err(Error::InvalidBijection(format!(
                    "{map:?} is not a permutation of 0..{n}"
                )));
            }
        }
        Ok(Bijection { map })
    }

    pub fn identity(n: usize) -> Self {
        Bijection {
            map: (0..n).collect(),
        }
    }

    /// The transposition of `a` and `b` on `{0..n-1}`.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Bijection { map }
    }

    /// `i ↦ i+1 mod n`.
    pub fn cycle(n: usize) -> Self {
        Bijection {
            map: (0..n).map(|i| (i + 1) % n).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Bijection {
        let mut inv = vec![0; self.map.len()];
        for (i, &a) in self.map.iter().enumerate() {
            inv[a] = i;
        }
        Bijection { map: inv }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Bijection) -> Bijection {
        Bijection {
            map: other.map.iter().map(|&a| self.map[a]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &a)| i == a)
    }
}

impl TryFrom<Vec<usize>> for Bijection {
    type Error = Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Bijection::new(map)
    }
}

impl From<Bijection> for Vec<usize> {
    fn from(b: Bijection) -> Self {
        b.map
    }
}

/// The pointwise image of every interpretation under `pi`.
pub fn apply_bijection(s: &Structure, pi: &Bijection) -> Result<Structure> {
    if pi.size() != s.size {
        return Err(Error::DimensionMismatch {
            expected: s.size,
            found: pi.size(),
        });
    }
    Ok(Structure {
        vocabulary: s.vocabulary.clone(),
        size: s.size,
        relations: s.relations.iter().map(|r| r.image(pi)).collect(),
    })
}

/// Restriction of `s` to the symbols of `sub`.
pub fn reduct(s: &Structure, sub: &Vocabulary) -> Result<Structure> {
    let mut relations = Vec::with_capacity(sub.len());
    for sym in sub.symbols() {
        match s.vocabulary.index_of(&sym.name) {
            Some(i) if s.vocabulary.symbols()[i].arity == sym.arity => {
                relations.push(s.relations[i].clone())
            }
            Some(_) => {
                return Err(Error::Vocabulary(format!(
                    "symbol {sym} has a different arity in {}",
                    s.vocabulary
                )))
            }
            None => {
                return Err(Error::Vocabulary(format!(
                    "symbol {sym} is not in {}",
                    s.vocabulary
                )))
            }
        }
    }
    Ok(Structure {
        vocabulary: Arc::new(sub.clone()),
        size: s.size,
        relations,
    })
}
