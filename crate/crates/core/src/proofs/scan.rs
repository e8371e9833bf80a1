//! Soundness scan: which Keisler axioms survive when `Q` means "at least `k`"
//! on small finite structures.
//!
//! Instances come from a fixed pool of formulas over one binary symbol `R`
//! and the variables `x`, `y`, `z`. An instance with free variables counts as
//! true in a structure when it holds under every assignment. Truth is
//! isomorphism-invariant, so one structure per isomorphism class is scanned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{CompiledFormula, Env, QInterpretation};
use crate::structures::{check_budget, isomorphism_classes, Structure, Vocabulary};
use crate::syntax::{parse, Formula, Var};

use super::{Schema, Substitution};

const VARS: [&str; 3] = ["x", "y", "z"];

/// Formulas substituted for `phi` and `psi`.
const POOL: &[&str] = &[
    "R(x, y)",
    "R(y, x)",
    "R(x, x)",
    "R(y, y)",
    "x = y",
    "R(x, z)",
    "!R(x, y)",
    "!R(x, x)",
    "!(x = y)",
    "R(x, y) & R(y, x)",
    "R(x, y) | x = y",
    "R(x, y) -> R(y, x)",
    "exists z. R(x, z) & R(z, y)",
    "forall z. R(z, y)",
    "Q z. R(x, z)",
    "true",
];

fn pool() -> Vec<Formula> {
    POOL.iter()
        .map(|t| parse(t).expect("static pool formula"))
        .collect()
}

/// Every generated instance of Keisler axiom `index`, in a fixed order.
pub fn instance_pool(index: u8) -> Result<Vec<Formula>> {
    let schema = Schema::keisler(index)
        .ok_or_else(|| Error::InvalidOperation(format!("no Keisler axiom {index}")))?;
    let pool = pool();
    let mut subs = Vec::new();
    let pairs = || {
        VARS.iter()
            .flat_map(|&a| VARS.iter().map(move |&b| (a, b)))
            .filter(|(a, b)| a != b)
    };
    match schema {
        Schema::Keisler1 => {
            for &x in &VARS {
                for &y in &VARS {
                    for &z in &VARS {
                        subs.push(Substitution::new().var("x", x).var("y", y).var("z", z));
                    }
                }
            }
        }
        Schema::Keisler2 => {
            for phi in &pool {
                for psi in &pool {
                    subs.push(
                        Substitution::new()
                            .formula("phi", phi.clone())
                            .formula("psi", psi.clone())
                            .var("x", "x"),
                    );
                }
            }
        }
        _ => {
            for phi in &pool {
                for (x, y) in pairs() {
                    subs.push(
                        Substitution::new()
                            .formula("phi", phi.clone())
                            .var("x", x)
                            .var("y", y),
                    );
                }
            }
        }
    }
    // Substitutions violating a side condition are not instances.
    Ok(subs
        .iter()
        .filter_map(|s| schema.instantiate(s).ok())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCounterexample {
    pub axiom: u8,
    pub instance: Formula,
    pub structure: Structure,
    /// A falsifying assignment to the instance's free variables.
    pub assignment: Vec<(Var, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub k: u32,
    pub max_size: usize,
    /// Isomorphism classes scanned, summed over sizes.
    pub structures: usize,
    /// `(axiom, instance count)` per scanned axiom.
    pub instances: Vec<(u8, usize)>,
    pub counterexamples: Vec<ScanCounterexample>,
}

impl ScanReport {
    pub fn counterexamples_for(&self, axiom: u8) -> impl Iterator<Item = &ScanCounterexample> {
        self.counterexamples
            .iter()
            .filter(move |c| c.axiom == axiom)
    }
}

/// Evaluates every pooled instance of the given axioms on one structure per
/// isomorphism class of each size in `1..=max_size`, with `Q` read as
/// "at least `k`". The budget bounds instance-structure evaluations.
pub fn soundness_scan(k: u32, max_size: usize, axioms: &[u8], budget: u128) -> Result<ScanReport> {
    if k == 0 {
        return Err(Error::InvalidOperation(
            "threshold must be at least 1".into(),
        ));
    }
    let v = Vocabulary::parse("R/2")?;
    let env = Env::new().with_q(QInterpretation::CountThreshold(k));
    let mut reps: Vec<Structure> = Vec::new();
    for n in 1..=max_size {
        reps.extend(
            isomorphism_classes(&v, n, budget)?
                .into_iter()
                .map(|c| c.representative),
        );
    }
    let pools: Vec<(u8, Vec<Formula>)> = axioms
        .iter()
        .map(|&a| Ok((a, instance_pool(a)?)))
        .collect::<Result<_>>()?;
    let total: u128 = pools.iter().map(|(_, p)| p.len() as u128).sum::<u128>() * reps.len() as u128;
    check_budget(Some(total), budget)?;
    let mut counterexamples = Vec::new();
    for (axiom, instances) in &pools {
        for inst in instances {
            let free: Vec<Var> = inst.free_vars().into_iter().collect();
            let names: Vec<&str> = free.iter().map(String::as_str).collect();
            let compiled = CompiledFormula::compile(inst, &v, &env, &names)?;
            let mut eval = compiled.evaluator();
            for s in &reps {
                let sat = eval.satisfying(s)?;
                if sat.len() == sat.slots() {
                    continue;
                }
                let missing = (0..sat.slots())
                    .find(|&i| !sat.get_index(i))
                    .expect("some assignment fails");
                counterexamples.push(ScanCounterexample {
                    axiom: *axiom,
                    instance: inst.clone(),
                    structure: s.clone(),
                    assignment: free.iter().cloned().zip(sat.tuple_at(missing)).collect(),
                });
            }
        }
    }
    Ok(ScanReport {
        k,
        max_size,
        structures: reps.len(),
        instances: pools.iter().map(|(a, p)| (*a, p.len())).collect(),
        counterexamples,
    })
}
