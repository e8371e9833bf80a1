use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evaluator::{CompiledFormula, Env};
use crate::structures::{
    apply_bijection, enumerate_structures, permutations, Bijection, Relation, Structure, Vocabulary,
};
use crate::syntax::Formula;

type Membership = dyn Fn(&Structure) -> bool + Send + Sync;

/// A model class given by a membership predicate on finite structures of a
/// fixed vocabulary. Membership must be isomorphism-closed.
#[derive(Clone)]
pub struct ClassOracle {
    name: String,
    vocabulary: Vocabulary,
    membership: Arc<Membership>,
}

impl fmt::Debug for ClassOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassOracle")
            .field("name", &self.name)
            .field("vocabulary", &self.vocabulary)
            .finish_non_exhaustive()
    }
}

impl ClassOracle {
    pub fn new(
        name: impl Into<String>,
        vocabulary: Vocabulary,
        membership: impl Fn(&Structure) -> bool + Send + Sync + 'static,
    ) -> Self {
        ClassOracle {
            name: name.into(),
            vocabulary,
            membership: Arc::new(membership),
        }
    }

    /// `Mod(φ)` restricted to `vocabulary`.
    pub fn from_sentence(
        name: impl Into<String>,
        vocabulary: Vocabulary,
        sentence: &Formula,
        env: &Env,
    ) -> Result<Self> {
        let compiled = Arc::new(CompiledFormula::compile(sentence, &vocabulary, env, &[])?);
        Ok(ClassOracle::new(name, vocabulary, move |s: &Structure| {
            compiled.eval(s).unwrap_or(false)
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    /// Membership; structures over a different vocabulary are never members.
    pub fn contains(&self, s: &Structure) -> bool {
        s.vocabulary() == &self.vocabulary && (self.membership)(s)
    }

    /// Random probe of isomorphism closure on sizes `1..=max_size`, seeded for
    /// reproducibility.
    pub fn check_sampled(&self, max_size: usize, samples: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let n = rng.gen_range(1..=max_size.max(1));
            let s = random_structure(&self.vocabulary, n, &mut rng);
            let map = rand::seq::index::sample(&mut rng, n, n).into_vec();
            let pi = Bijection::new(map).expect("sampled permutation");
            self.expect_agreement(&s, &pi)?;
        }
        Ok(())
    }

    /// Exhaustive isomorphism-closure check over every structure of size
    /// `1..=max_size` and every permutation; returns the first violation.
    pub fn closure_violation(
        &self,
        max_size: usize,
        budget: u128,
    ) -> Result<Option<(Structure, Bijection)>> {
        for n in 1..=max_size {
            let perms = permutations(n);
            for s in enumerate_structures(&self.vocabulary, n, budget)? {
                let member = self.contains(&s);
                for pi in perms.iter().skip(1) {
                    if self.contains(&apply_bijection(&s, pi)?) != member {
                        return Ok(Some((s, pi.clone())));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_isomorphism_closed(&self, max_size: usize, budget: u128) -> Result<bool> {
        Ok(self.closure_violation(max_size, budget)?.is_none())
    }

    fn expect_agreement(&self, s: &Structure, pi: &Bijection) -> Result<()> {
        let image = apply_bijection(s, pi)?;
        if self.contains(s) != self.contains(&image) {
            return Err(Error::NotIsomorphismClosed {
                name: self.name.clone(),
                detail: format!(
                    "membership differs between {s:?} and its image under {:?}",
                    pi.as_slice()
                ),
            });
        }
        Ok(())
    }
}

pub(crate) fn random_structure(v: &Vocabulary, n: usize, rng: &mut impl Rng) -> Structure {
    let relations = v
        .symbols()
        .iter()
        .map(|sym| {
            let mut r = Relation::empty(sym.arity, n);
            for i in 0..r.slots() {
                r.set_index(i, rng.gen_bool(0.5));
            }
            r
        })
        .collect();
    Structure::from_relations(v.clone(), n, relations).expect("shapes match")
}

/// Names accepted by [`builtin_class`].
pub const BUILTIN_CLASSES: &[&str] = &["nonempty-P", "even-P", "even-size", "all", "empty"];

/// Built-in classes addressable by name. `all` and `empty` take the given
/// vocabulary (default `{P/1}`); `even-size` ignores relations and defaults to
/// the empty vocabulary.
pub fn builtin_class(name: &str, vocabulary: Option<&Vocabulary>) -> Option<ClassOracle> {
    let unary_p = || Vocabulary::parse("P/1").expect("static vocabulary");
    let p_len = |s: &Structure| s.relation("P").map_or(0, Relation::len);
    Some(match name {
        "nonempty-P" => ClassOracle::new(name, unary_p(), move |s| p_len(s) > 0),
        "even-P" => ClassOracle::new(name, unary_p(), move |s| p_len(s) % 2 == 0),
        "even-size" => ClassOracle::new(name, vocabulary.cloned().unwrap_or_default(), |s| {
            s.size() % 2 == 0
        }),
        "all" => ClassOracle::new(name, vocabulary.cloned().unwrap_or_else(unary_p), |_| true),
        "empty" => ClassOracle::new(name, vocabulary.cloned().unwrap_or_else(unary_p), |_| false),
        _ => return None,
    })
}
