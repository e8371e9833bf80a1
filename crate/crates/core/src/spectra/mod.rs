//! Finite spectra and finite-window Löwenheim–Skolem checks.
//!
//! Everything here looks at sizes `1..=N` only. Statements about sizes past
//! the window are reported as inconclusive, never inferred.

mod cardinals;
pub mod corpus;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::definability::ProjectionDefinition;
use crate::error::Result;
use crate::evaluator::{ClassOracle, CompiledFormula, Env};
use crate::structures::{
    canonical_key_with, check_budget, permutations, structure_count, Structure, StructureCursor,
    Vocabulary,
};
use crate::syntax::Formula;

pub use cardinals::{ls_check, CardinalClassSpec, LsReport, LsVerdict};

/// Above this many models at one size, isomorphism classes are not counted.
pub const CLASS_COUNT_CAP: u128 = 100_000;

/// What a spectrum is taken of.
#[derive(Debug, Clone)]
pub enum Target {
    Sentence {
        vocabulary: Vocabulary,
        sentence: Formula,
    },
    Oracle(ClassOracle),
    Projection(ProjectionDefinition),
}

impl Target {
    /// A sentence over exactly the relation symbols it mentions.
    pub fn sentence(sentence: Formula) -> Result<Target> {
        let vocabulary = Vocabulary::new(
            sentence
                .relation_symbols()
                .into_iter()
                .map(|(name, arity)| crate::structures::Symbol::new(name, arity)),
        )?;
        Ok(Target::Sentence {
            vocabulary,
            sentence,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        match self {
            Target::Sentence { vocabulary, .. } => vocabulary,
            Target::Oracle(k) => k.vocabulary(),
            Target::Projection(d) => d.visible_vocabulary(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Target::Sentence { sentence, .. } => sentence.to_string(),
            Target::Oracle(k) => format!("class {}", k.name()),
            Target::Projection(d) => format!("projection of {}", d.sentence()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCount {
    pub size: usize,
    pub models: u128,
    /// Isomorphism classes among the models; absent above [`CLASS_COUNT_CAP`].
    pub classes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub target: String,
    pub max_size: usize,
    pub realized: Vec<usize>,
    pub counts: Vec<SizeCount>,
    /// Largest realized size in the window. Says nothing about larger sizes.
    pub largest_realized: Option<usize>,
}

impl SpectrumReport {
    pub fn is_realized(&self, n: usize) -> bool {
        self.realized.contains(&n)
    }

    pub fn min_size(&self) -> Option<usize> {
        self.realized.first().copied()
    }
}

/// Model counting at one size, reusing one compiled sentence.
struct Scanner<'a> {
    target: &'a Target,
    compiled: Option<CompiledFormula>,
    sigma: Option<crate::definability::SigmaChecker<'a>>,
    budget: u128,
}

impl<'a> Scanner<'a> {
    fn new(target: &'a Target, env: &Env, budget: u128) -> Result<Self> {
        let (compiled, sigma) = match target {
            Target::Sentence {
                vocabulary,
                sentence,
            } => (
                Some(CompiledFormula::compile(sentence, vocabulary, env, &[])?),
                None,
            ),
            Target::Oracle(_) => (None, None),
            Target::Projection(d) => (None, Some(d.checker(env)?)),
        };
        Ok(Scanner {
            target,
            compiled,
            sigma,
            budget,
        })
    }

    /// Counts models of size `n`; with `stop_at_first`, returns after one.
    fn scan(&self, n: usize, count_classes: bool, stop_at_first: bool) -> Result<SizeCount> {
        let v = self.target.vocabulary().clone();
        let total = check_budget(structure_count(&v, n), self.budget)?;
        let mut cursor = StructureCursor::new(v, n);
        let mut eval = self.compiled.as_ref().map(CompiledFormula::evaluator);
        let perms = if count_classes {
            permutations(n)
        } else {
            Vec::new()
        };
        let mut keys = HashSet::new();
        let mut models = 0u128;
        let mut classes_ok = count_classes;
        for _ in 0..total {
            let s = cursor.current();
            let hit = match (&mut eval, &self.sigma, self.target) {
                (Some(e), _, _) => e.eval(s)?,
                (_, Some(c), _) => c.accepts(s, self.budget)?,
                (_, _, Target::Oracle(k)) => k.contains(s),
                _ => unreachable!("scanner built for every target kind"),
            };
            if hit {
                models += 1;
                if stop_at_first {
                    break;
                }
                if classes_ok {
                    if models > CLASS_COUNT_CAP {
                        classes_ok = false;
                        keys.clear();
                    } else {
                        keys.insert(canonical_key_with(s, &perms));
                    }
                }
            }
            cursor.advance();
        }
        Ok(SizeCount {
            size: n,
            models,
            classes: classes_ok.then_some(keys.len() as u64),
        })
    }
}

/// Models and isomorphism classes of `target` at every size in `1..=max_size`.
pub fn spectrum(
    target: &Target,
    max_size: usize,
    env: &Env,
    budget: u128,
) -> Result<SpectrumReport> {
    let total: Option<u128> = (1..=max_size).try_fold(0u128, |acc, n| {
        structure_count(target.vocabulary(), n).and_then(|c| acc.checked_add(c))
    });
    check_budget(total, budget)?;
    let scanner = Scanner::new(target, env, budget)?;
    let mut counts = Vec::new();
    for n in 1..=max_size {
        counts.push(scanner.scan(n, true, false)?);
    }
    let realized: Vec<usize> = counts
        .iter()
        .filter(|c| c.models > 0)
        .map(|c| c.size)
        .collect();
    Ok(SpectrumReport {
        target: target.label(),
        max_size,
        largest_realized: realized.last().copied(),
        realized,
        counts,
    })
}

/// Smallest model size in `1..=max_size`. `None` means no model in the window
/// and says nothing about larger sizes.
pub fn min_model_size(
    target: &Target,
    max_size: usize,
    env: &Env,
    budget: u128,
) -> Result<Option<usize>> {
    let scanner = Scanner::new(target, env, budget)?;
    for n in 1..=max_size {
        if scanner.scan(n, false, true)?.models > 0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Realized sizes only, without class counts. Cheaper than [`spectrum`].
pub fn realized_sizes(
    target: &Target,
    max_size: usize,
    env: &Env,
    budget: u128,
) -> Result<Vec<usize>> {
    let scanner = Scanner::new(target, env, budget)?;
    let mut out = Vec::new();
    for n in 1..=max_size {
        if scanner.scan(n, false, true)?.models > 0 {
            out.push(n);
        }
    }
    Ok(out)
}

/// Model counts per size as a map, for callers that only need counts.
pub fn model_counts(report: &SpectrumReport) -> BTreeMap<usize, u128> {
    report.counts.iter().map(|c| (c.size, c.models)).collect()
}

/// Whether a structure is a model of the target (for one-off checks).
pub fn is_model(target: &Target, s: &Structure, env: &Env, budget: u128) -> Result<bool> {
    match target {
        Target::Sentence {
            vocabulary,
            sentence,
        } => CompiledFormula::compile(sentence, vocabulary, env, &[])?.eval(s),
        Target::Oracle(k) => Ok(k.contains(s)),
        Target::Projection(d) => d.checker(env)?.accepts(s, budget),
    }
}
