use std::sync::Arc;

use crate::error::{Error, Result};
use crate::structures::{Structure, Vocabulary};

/// `2^(Σ n^arity)`, or `None` when it does not fit in a `u128`.
pub fn structure_count(v: &Vocabulary, n: usize) -> Option<u128> {
    let mut bits: u128 = 0;
    for s in v.symbols() {
        let slots = (n as u128).checked_pow(s.arity as u32)?;
        bits = bits.checked_add(slots)?;
    }
    if bits >= 128 {
        None
    } else {
        Some(1u128 << bits)
    }
}

pub(crate) fn check_budget(count: Option<u128>, budget: u128) -> Result<u128> {
    match count {
        Some(c) if c <= budget => Ok(c),
        Some(c) => Err(Error::EnumerationLimit { count: c, budget }),
        None => Err(Error::EnumerationLimit {
            count: u128::MAX,
            budget,
        }),
    }
}

/// In-place odometer over the interpretations of the symbols from index
/// `first_free` onward; earlier interpretations stay fixed.
///
/// Hot loops use this directly to avoid cloning a structure per step.
#[derive(Debug, Clone)]
pub struct StructureCursor {
    current: Structure,
    first_free: usize,
}

impl StructureCursor {
    pub fn new(v: Vocabulary, n: usize) -> Self {
        StructureCursor {
            current: Structure::empty(v, n),
            first_free: 0,
        }
    }

    pub(crate) fn over_free_suffix(start: Structure, first_free: usize) -> Self {
        StructureCursor {
            current: start,
            first_free,
        }
    }

    pub fn current(&self) -> &Structure {
        &self.current
    }

    /// Steps to the next structure; false once every combination has been
    /// visited (the cursor is then back at the first one).
    pub fn advance(&mut self) -> bool {
        let first_free = self.first_free;
        for rel in self.current.relations_mut()[first_free..].iter_mut().rev() {
            if rel.increment() {
                return true;
            }
        }
        false
    }
}

/// Owning iterator over a cursor; yields clones.
#[derive(Debug, Clone)]
pub struct StructureIter {
    cursor: StructureCursor,
    remaining: u128,
}

impl Iterator for StructureIter {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.cursor.current().clone();
        self.remaining -= 1;
        if self.remaining > 0 {
            self.cursor.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, usize::try_from(self.remaining).ok())
    }
}

/// Every structure of size `n` over `v`, exactly once, in the documented order.
pub fn enumerate_structures(v: &Vocabulary, n: usize, budget: u128) -> Result<StructureIter> {
    let count = check_budget(structure_count(v, n), budget)?;
    Ok(StructureIter {
        cursor: StructureCursor::new(v.clone(), n),
        remaining: count,
    })
}

pub(crate) fn expansion_cursor(
    s: &Structure,
    extra: &Vocabulary,
    budget: u128,
) -> Result<(StructureCursor, u128)> {
    if !s.vocabulary().is_disjoint(extra) {
        return Err(Error::Vocabulary(format!(
            "expansion symbols {extra} clash with {}",
            s.vocabulary()
        )));
    }
    let count = check_budget(structure_count(extra, s.size()), budget)?;
    let union = s.vocabulary().extended(extra)?;
    let mut start = Structure::empty_shared(Arc::new(union), s.size());
    for (dst, src) in start.relations_mut().iter_mut().zip(s.relations()) {
        *dst = src.clone();
    }
    let fixed = s.vocabulary().len();
    Ok((StructureCursor::over_free_suffix(start, fixed), count))
}

/// Every expansion of `s` to `s.vocabulary ++ extra`, in enumeration order of
/// the extra symbols.
pub fn expansions(s: &Structure, extra: &Vocabulary, budget: u128) -> Result<StructureIter> {
    let (cursor, count) = expansion_cursor(s, extra, budget)?;
    Ok(StructureIter {
        cursor,
        remaining: count,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::structures::reduct;

    fn vocab(text: &str) -> Vocabulary {
        Vocabulary::parse(text).unwrap()
    }

    #[test]
    fn counts_match_examples() {
        assert_eq!(
            enumerate_structures(&vocab("P/1"), 2, 100).unwrap().count(),
            4
        );
        assert_eq!(
            enumerate_structures(&vocab("R/2"), 2, 100).unwrap().count(),
            16
        );
        assert_eq!(
            enumerate_structures(&vocab("P/1, R/2"), 3, 10_000)
                .unwrap()
                .count(),
            4096
        );
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let all: Vec<_> = enumerate_structures(&vocab("P/1, R/2"), 2, 1000)
            .unwrap()
            .collect();
        let distinct: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(all.len(), 64);
        assert_eq!(distinct.len(), 64);
    }

    #[test]
    fn first_symbol_varies_slowest() {
        let all: Vec<_> = enumerate_structures(&vocab("P/1, S/1"), 1, 100)
            .unwrap()
            .collect();
        let p: Vec<usize> = all.iter().map(|s| s.relation("P").unwrap().len()).collect();
        let q: Vec<usize> = all.iter().map(|s| s.relation("S").unwrap().len()).collect();
        assert_eq!(p, vec![0, 0, 1, 1]);
        assert_eq!(q, vec![0, 1, 0, 1]);
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_structures(&vocab("R/2"), 3, 100).unwrap_err();
        assert_eq!(
            err,
            Error::EnumerationLimit {
                count: 512,
                budget: 100
            }
        );
        assert!(enumerate_structures(&vocab("R/3"), 6, u128::MAX).is_err());
    }

    #[test]
    fn empty_vocabulary_has_one_structure() {
        assert_eq!(
            enumerate_structures(&Vocabulary::empty(), 3, 10)
                .unwrap()
                .count(),
            1
        );
        assert_eq!(
            enumerate_structures(&vocab("P/1"), 0, 10).unwrap().count(),
            1
        );
    }

    #[test]
    fn expansion_counts_and_reducts() {
        let s = Structure::new(vocab("P/1"), 2, &[("P", &[&[1]])]).unwrap();
        let ex: Vec<_> = expansions(&s, &vocab("S/1"), 100).unwrap().collect();
        assert_eq!(ex.len(), 4);
        for e in &ex {
            assert_eq!(reduct(e, s.vocabulary()).unwrap(), s);
        }

        let one = Structure::empty(vocab("P/1"), 1);
        assert_eq!(expansions(&one, &vocab("T/2"), 100).unwrap().count(), 2);
        assert!(expansions(&one, &vocab("P/2"), 100).is_err());
    }
}
