//! Operations on semantic values and their invariance under bijections.
//!
//! A local operation on `M = {0..n-1}` maps a finite sequence of relations
//! `A_0, .., A_{b-1}` (of fixed arities) to a relation of a fixed output
//! arity. Inputs are enumerated as structures over the vocabulary
//! `P0, .., P{b-1}`, so "first in enumeration order" means the first input
//! sequence in structure enumeration order (first input slowest), and within
//! one input the permutations in lexicographic order.

mod table;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{ClassOracle, CompiledFormula, Env};
use crate::structures::{
    check_budget, enumerate_structures, permutations, structure_count, Bijection, Relation,
    Structure, Symbol, Vocabulary, DEFAULT_BUDGET,
};
use crate::syntax::Formula;

pub use table::{
    builtin_global, builtin_operation, parse_operation, render_operation, BUILTIN_OPERATIONS,
};

type RuleFn = dyn Fn(usize, &[Relation]) -> Relation + Send + Sync;

/// How a local operation computes its output.
#[derive(Clone)]
pub enum OpRule {
    /// Explicit entries. Inputs without an entry map to `∅` when
    /// `default_empty` is set and are undefined otherwise.
    Table {
        entries: HashMap<Vec<Relation>, Relation>,
        default_empty: bool,
    },
    /// A total rule, called with the domain size and the inputs.
    Rule(Arc<RuleFn>),
}

#[derive(Clone)]
pub struct LocalOperation {
    name: String,
    size: usize,
    input_arities: Vec<usize>,
    output_arity: usize,
    rule: OpRule,
}

impl fmt::Debug for LocalOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalOperation")
            .field("name", &self.name)
            .field("size", &self.size)
            .field("input_arities", &self.input_arities)
            .field("output_arity", &self.output_arity)
            .finish_non_exhaustive()
    }
}

/// Vocabulary `P0/a0, P1/a1, ..` naming the inputs of an operation.
pub fn input_vocabulary(arities: &[usize]) -> Vocabulary {
    Vocabulary::new(
        arities
            .iter()
            .enumerate()
            .map(|(i, &a)| Symbol::new(format!("P{i}"), a)),
    )
    .expect("distinct generated names")
}

impl LocalOperation {
    pub fn from_rule(
        name: impl Into<String>,
        size: usize,
        input_arities: Vec<usize>,
        output_arity: usize,
        rule: impl Fn(usize, &[Relation]) -> Relation + Send + Sync + 'static,
    ) -> Self {
        LocalOperation {
            name: name.into(),
            size,
            input_arities,
            output_arity,
            rule: OpRule::Rule(Arc::new(rule)),
        }
    }

    pub fn from_table(
        name: impl Into<String>,
        size: usize,
        input_arities: Vec<usize>,
        output_arity: usize,
        entries: HashMap<Vec<Relation>, Relation>,
        default_empty: bool,
    ) -> Result<Self> {
        for (inputs, output) in &entries {
            check_shape(size, &input_arities, inputs)?;
            if output.arity() != output_arity || output.domain() != size {
                return Err(Error::InvalidOperation(format!(
                    "table output has arity {} over {} elements, expected {output_arity} over {size}",
                    output.arity(),
                    output.domain()
                )));
            }
        }
        Ok(LocalOperation {
            name: name.into(),
            size,
            input_arities,
            output_arity,
            rule: OpRule::Table {
                entries,
                default_empty,
            },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn input_arities(&self) -> &[usize] {
        &self.input_arities
    }

    pub fn output_arity(&self) -> usize {
        self.output_arity
    }

    pub fn rule(&self) -> &OpRule {
        &self.rule
    }

    /// Number of input sequences, `Π 2^(n^a)`, if it fits.
    pub fn input_count(&self) -> Option<u128> {
        structure_count(&input_vocabulary(&self.input_arities), self.size)
    }

    /// Whether the operation is defined on every input sequence.
    pub fn is_total(&self) -> bool {
        match &self.rule {
            OpRule::Rule(_) => true,
            OpRule::Table {
                entries,
                default_empty,
            } => {
                *default_empty
                    || self
                        .input_count()
                        .is_some_and(|c| entries.len() as u128 == c)
            }
        }
    }

    pub fn apply(&self, inputs: &[Relation]) -> Result<Relation> {
        check_shape(self.size, &self.input_arities, inputs)?;
        let out = match &self.rule {
            OpRule::Rule(rule) => rule(self.size, inputs),
            OpRule::Table {
                entries,
                default_empty,
            } => match entries.get(inputs) {
                Some(out) => out.clone(),
                None if *default_empty => Relation::empty(self.output_arity, self.size),
                None => {
                    return Err(Error::InvalidOperation(format!(
                        "`{}` has no table entry for {}",
                        self.name,
                        show_inputs(inputs)
                    )))
                }
            },
        };
        if out.arity() != self.output_arity || out.domain() != self.size {
            return Err(Error::InvalidOperation(format!(
                "`{}` produced arity {} over {} elements",
                self.name,
                out.arity(),
                out.domain()
            )));
        }
        Ok(out)
    }
}

fn check_shape(size: usize, arities: &[usize], inputs: &[Relation]) -> Result<()> {
    if inputs.len() != arities.len() {
        return Err(Error::DimensionMismatch {
            expected: arities.len(),
            found: inputs.len(),
        });
    }
    for (rel, &a) in inputs.iter().zip(arities) {
        if rel.arity() != a || rel.domain() != size {
            return Err(Error::InvalidOperation(format!(
                "input of arity {} over {} elements, expected {a} over {size}",
                rel.arity(),
                rel.domain()
            )));
        }
    }
    Ok(())
}

pub(crate) fn show_inputs(inputs: &[Relation]) -> String {
    inputs
        .iter()
        .map(|r| format!("{{{}}}", crate::structures::format_tuples(r)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A family of local operations, one per domain size, with uniform arities.
#[derive(Clone)]
pub struct GlobalOperation {
    name: String,
    input_arities: Vec<usize>,
    output_arity: usize,
    family: Family,
}

#[derive(Clone)]
enum Family {
    Rule(Arc<RuleFn>),
    Tables(HashMap<usize, LocalOperation>),
}

impl fmt::Debug for GlobalOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GlobalOperation")
            .field("name", &self.name)
            .field("input_arities", &self.input_arities)
            .field("output_arity", &self.output_arity)
            .finish_non_exhaustive()
    }
}

impl GlobalOperation {
    pub fn from_rule(
        name: impl Into<String>,
        input_arities: Vec<usize>,
        output_arity: usize,
        rule: impl Fn(usize, &[Relation]) -> Relation + Send + Sync + 'static,
    ) -> Self {
        GlobalOperation {
            name: name.into(),
            input_arities,
            output_arity,
            family: Family::Rule(Arc::new(rule)),
        }
    }

    /// A family given size by size. Arities must agree across members.
    pub fn from_locals(name: impl Into<String>, locals: Vec<LocalOperation>) -> Result<Self> {
        let first = locals
            .first()
            .ok_or_else(|| Error::InvalidOperation("empty operation family".into()))?;
        let (input_arities, output_arity) = (first.input_arities.clone(), first.output_arity);
        let mut family = HashMap::new();
        for op in locals {
            if op.input_arities != input_arities || op.output_arity != output_arity {
                return Err(Error::InvalidOperation(format!(
                    "size {} has arities {:?} -> {}, family has {input_arities:?} -> {output_arity}",
                    op.size, op.input_arities, op.output_arity
                )));
            }
            if family.insert(op.size, op).is_some() {
                return Err(Error::InvalidOperation(
                    "two members of the same size".into(),
                ));
            }
        }
        Ok(GlobalOperation {
            name: name.into(),
            input_arities,
            output_arity,
            family: Family::Tables(family),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_arities(&self) -> &[usize] {
        &self.input_arities
    }

    pub fn output_arity(&self) -> usize {
        self.output_arity
    }

    /// The member on `{0..n-1}`.
    pub fn at(&self, n: usize) -> Result<LocalOperation> {
        match &self.family {
            Family::Rule(rule) => Ok(LocalOperation {
                name: self.name.clone(),
                size: n,
                input_arities: self.input_arities.clone(),
                output_arity: self.output_arity,
                rule: OpRule::Rule(rule.clone()),
            }),
            Family::Tables(members) => members.get(&n).cloned().ok_or_else(|| {
                Error::InvalidOperation(format!(
                    "`{}` is not defined on domains of size {n}",
                    self.name
                ))
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub size: usize,
    pub permutation: Bijection,
    pub inputs: Vec<Relation>,
    /// `f(π″A)`.
    pub image_then_apply: Relation,
    /// `π″f(A)`.
    pub apply_then_image: Relation,
}

impl Counterexample {
    /// Recomputes both sides; true when they really differ.
    pub fn recheck(&self, f: &LocalOperation) -> Result<bool> {
        let moved: Vec<Relation> = self
            .inputs
            .iter()
            .map(|r| r.image(&self.permutation))
            .collect();
        Ok(f.apply(&moved)? != f.apply(&self.inputs)?.image(&self.permutation))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    pub counterexample: Option<Counterexample>,
    /// Number of (input, permutation) pairs examined.
    pub checked: u128,
}

/// Checks `f(π″A) = π″f(A)` for every permutation `π` of the domain and every
/// input sequence `A`, stopping at the first violation.
pub fn is_permutation_invariant(f: &LocalOperation, budget: u128) -> Result<InvarianceReport> {
    let vocab = input_vocabulary(&f.input_arities);
    let perms = permutations(f.size);
    let inputs = structure_count(&vocab, f.size);
    let work = inputs.and_then(|c| c.checked_mul(perms.len() as u128));
    check_budget(work, budget)?;
    if !f.is_total() {
        return Err(Error::InvalidOperation(format!(
            "`{}` is not total; invariance needs every input",
            f.name
        )));
    }
    let mut checked = 0;
    for s in enumerate_structures(&vocab, f.size, u128::MAX)? {
        let a = s.relations();
        let out = f.apply(a)?;
        for pi in &perms {
            checked += 1;
            if pi.is_identity() {
                continue;
            }
            let moved: Vec<Relation> = a.iter().map(|r| r.image(pi)).collect();
            let lhs = f.apply(&moved)?;
            let rhs = out.image(pi);
            if lhs != rhs {
                return Ok(InvarianceReport {
                    invariant: false,
                    counterexample: Some(Counterexample {
                        size: f.size,
                        permutation: pi.clone(),
                        inputs: a.to_vec(),
                        image_then_apply: lhs,
                        apply_then_image: rhs,
                    }),
                    checked,
                });
            }
        }
    }
    Ok(InvarianceReport {
        invariant: true,
        counterexample: None,
        checked,
    })
}

/// Bijection invariance of a global operation on the canonical domains of
/// sizes `1..=max_size`. A bijection between two equinumerous domains is a
/// permutation of the canonical one after renaming, so this is the local
/// check at every size.
pub fn is_bijection_invariant(
    g: &GlobalOperation,
    max_size: usize,
    budget: u128,
) -> Result<InvarianceReport> {
    let mut checked = 0;
    for n in 1..=max_size {
        let report = is_permutation_invariant(&g.at(n)?, budget)?;
        checked += report.checked;
        if !report.invariant {
            return Ok(InvarianceReport { checked, ..report });
        }
    }
    Ok(InvarianceReport {
        invariant: true,
        counterexample: None,
        checked,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescribeMismatch {
    pub inputs: Vec<Relation>,
    pub formula_value: Relation,
    pub operation_value: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescribeReport {
    pub describes: bool,
    pub counterexample: Option<DescribeMismatch>,
}

/// Whether `φ(vars)` describes `f`: for every input sequence, the semantic
/// value of `φ` in the structure interpreting `predicates[i]` as `A_i`
/// equals `f(A)`.
pub fn describes(
    phi: &Formula,
    vars: &[&str],
    f: &LocalOperation,
    predicates: &[&str],
    env: &Env,
    budget: u128,
) -> Result<DescribeReport> {
    if predicates.len() != f.input_arities.len() {
        return Err(Error::DimensionMismatch {
            expected: f.input_arities.len(),
            found: predicates.len(),
        });
    }
    if vars.len() != f.output_arity {
        return Err(Error::DimensionMismatch {
            expected: f.output_arity,
            found: vars.len(),
        });
    }
    let vocab = Vocabulary::new(
        predicates
            .iter()
            .zip(&f.input_arities)
            .map(|(p, &a)| Symbol::new(*p, a)),
    )?;
    let compiled = CompiledFormula::compile(phi, &vocab, env, vars)?;
    let mut eval = compiled.evaluator();
    for s in enumerate_structures(&vocab, f.size, budget)? {
        let formula_value = eval.satisfying(&s)?;
        let operation_value = f.apply(s.relations())?;
        if formula_value != operation_value {
            return Ok(DescribeReport {
                describes: false,
                counterexample: Some(DescribeMismatch {
                    inputs: s.relations().to_vec(),
                    formula_value,
                    operation_value,
                }),
            });
        }
    }
    Ok(DescribeReport {
        describes: true,
        counterexample: None,
    })
}

/// Name of the output symbol added by [`class_of_operation`].
pub const OUTPUT_SYMBOL: &str = "P";

/// `K_g = {M : P^M = g_M(P0^M, ..)}` over the vocabulary `P0.., P`.
/// Structures on which `g` is undefined are not members.
pub fn class_of_operation(g: &GlobalOperation) -> ClassOracle {
    let mut symbols = input_vocabulary(&g.input_arities).symbols().to_vec();
    symbols.push(Symbol::new(OUTPUT_SYMBOL, g.output_arity));
    let vocab = Vocabulary::new(symbols).expect("`P` differs from `P<i>`");
    let g = g.clone();
    let k = g.input_arities.len();
    ClassOracle::new(
        format!("class-of-{}", g.name),
        vocab,
        move |s: &Structure| {
            let rels = s.relations();
            g.at(s.size())
                .and_then(|f| f.apply(&rels[..k]))
                .is_ok_and(|out| out == rels[k])
        },
    )
}

/// `f^K_M(R) = M` when `(M, R) ∈ K` and `∅` otherwise; output arity 1.
pub fn operation_of_class(k: &ClassOracle) -> GlobalOperation {
    let arities: Vec<usize> = k.vocabulary().symbols().iter().map(|s| s.arity).collect();
    let k = k.clone();
    let vocab = k.vocabulary().clone();
    GlobalOperation::from_rule(
        format!("operation-of-{}", k.name()),
        arities,
        1,
        move |n, inputs| {
            let s = Structure::from_relations(vocab.clone(), n, inputs.to_vec())
                .expect("shapes checked by apply");
            if k.contains(&s) {
                Relation::full(1, n)
            } else {
                Relation::empty(1, n)
            }
        },
    )
}

/// [`is_permutation_invariant`] with the default budget.
pub fn check_invariance(f: &LocalOperation) -> Result<InvarianceReport> {
    is_permutation_invariant(f, DEFAULT_BUDGET)
}
