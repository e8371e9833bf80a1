//! Satisfaction of formulas in finite structures.

mod compiled;
mod oracle;
mod partial;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
pub(crate) use compiled::is_strict_linear_order;
pub use compiled::{CompiledFormula, Evaluator};
#[allow(unused_imports)]
pub(crate) use oracle::random_structure;
pub use oracle::{builtin_class, ClassOracle, BUILTIN_CLASSES};
pub(crate) use partial::search_completion;
pub use partial::{PartialEvaluator, PartialStructure, Trit};

use crate::error::{Error, Result};
use crate::structures::{Relation, Structure};
use crate::syntax::Formula;

/// Interpretation of the schematic quantifier `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QInterpretation {
    /// `Q x. φ` holds iff at least `k` elements satisfy `φ`.
    CountThreshold(u32),
    Hartig,
    Rescher,
    WellOrder,
}

/// Samples used when registering an oracle.
const ORACLE_PROBES: usize = 64;
const ORACLE_PROBE_SIZE: usize = 4;

/// Evaluation environment: the binding of `Q` and the registered class oracles.
#[derive(Debug, Clone, Default)]
pub struct Env {
    q: Option<QInterpretation>,
    oracles: BTreeMap<String, ClassOracle>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn with_q(mut self, q: QInterpretation) -> Self {
        self.q = Some(q);
        self
    }

    pub fn q(&self) -> Option<QInterpretation> {
        self.q
    }

    /// Registers `oracle` under its name after a seeded random probe of
    /// isomorphism closure. A detected violation is an error.
    pub fn register(&mut self, oracle: ClassOracle, seed: u64) -> Result<()> {
        oracle.check_sampled(ORACLE_PROBE_SIZE, ORACLE_PROBES, seed)?;
        self.oracles.insert(oracle.name().to_string(), oracle);
        Ok(())
    }

    pub fn with_oracle(mut self, oracle: ClassOracle) -> Result<Self> {
        self.register(oracle, 0)?;
        Ok(self)
    }

    pub fn oracle(&self, name: &str) -> Option<&ClassOracle> {
        self.oracles.get(name)
    }
}

/// The relation defined by a formula with distinguished free variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticValue {
    pub vars: Vec<String>,
    pub tuples: Relation,
}

impl SemanticValue {
    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Truth of a sentence in `s`.
pub fn eval_sentence(s: &Structure, f: &Formula, env: &Env) -> Result<bool> {
    CompiledFormula::compile(f, s.vocabulary(), env, &[])?.eval(s)
}

/// Truth of `f` under an assignment of the listed variables.
pub fn eval_assignment(
    s: &Structure,
    f: &Formula,
    vars: &[&str],
    values: &[usize],
    env: &Env,
) -> Result<bool> {
    CompiledFormula::compile(f, s.vocabulary(), env, vars)?
        .evaluator()
        .eval_with(s, values)
}

/// The set of tuples over `vars` satisfying `f`. With no variables the result
/// is `{()}` when `f` holds and empty otherwise.
pub fn eval_value(s: &Structure, f: &Formula, vars: &[&str], env: &Env) -> Result<SemanticValue> {
    let mut seen = std::collections::BTreeSet::new();
    if let Some(dup) = vars.iter().find(|v| !seen.insert(**v)) {
        return Err(Error::IllFormed(format!("variable `{dup}` listed twice")));
    }
    let compiled = CompiledFormula::compile(f, s.vocabulary(), env, vars)?;
    let tuples = compiled.evaluator().satisfying(s)?;
    Ok(SemanticValue {
        vars: vars.iter().map(|v| v.to_string()).collect(),
        tuples,
    })
}
