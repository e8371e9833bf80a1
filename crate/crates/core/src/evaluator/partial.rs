//! Three-valued evaluation over partially specified structures.
//!
//! Some tuples of some relations may be unknown. The result is `True` or
//! `False` only when every completion of the unknown tuples agrees, which lets
//! expansion searches prune a branch as soon as the sentence is settled.

use crate::error::{Error, Result};
use crate::evaluator::compiled::{Id, Node, Slot};
use crate::evaluator::CompiledFormula;
use crate::structures::{Relation, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trit {
    False,
    True,
    Unknown,
}

impl Trit {
    fn from_bool(b: bool) -> Self {
        if b {
            Trit::True
        } else {
            Trit::False
        }
    }

    fn not(self) -> Self {
        match self {
            Trit::False => Trit::True,
            Trit::True => Trit::False,
            Trit::Unknown => Trit::Unknown,
        }
    }
}

pub struct PartialEvaluator<'a> {
    program: &'a CompiledFormula,
    assign: Vec<usize>,
    memo: Vec<u8>,
    offsets: Vec<usize>,
    memo_size: usize,
}

/// A structure whose relations are known only on the tuples marked in
/// `known`; `None` means fully known.
pub struct PartialStructure<'s> {
    pub values: &'s Structure,
    pub known: &'s [Option<Relation>],
}

impl PartialStructure<'_> {
    fn bit(&self, r: usize, idx: usize) -> Trit {
        match &self.known[r] {
            Some(k) if !k.get_index(idx) => Trit::Unknown,
            _ => Trit::from_bool(self.values.relations()[r].get_index(idx)),
        }
    }

    fn is_complete(&self) -> bool {
        self.known
            .iter()
            .all(|k| k.as_ref().is_none_or(|k| k.len() == k.slots()))
    }
}

impl CompiledFormula {
    pub fn partial_evaluator(&self) -> PartialEvaluator<'_> {
        PartialEvaluator {
            program: self,
            assign: vec![0; self.slot_names.len()],
            memo: Vec::new(),
            offsets: Vec::new(),
            memo_size: usize::MAX,
        }
    }
}

impl PartialEvaluator<'_> {
    /// Evaluates a sentence on `p`.
    pub fn eval(&mut self, p: &PartialStructure<'_>) -> Result<Trit> {
        self.program.check_structure(p.values)?;
        if p.known.len() != p.values.relations().len() {
            return Err(Error::DimensionMismatch {
                expected: p.values.relations().len(),
                found: p.known.len(),
            });
        }
        if !self.program.params.is_empty() {
            return Err(Error::IllFormed(
                "partial evaluation takes sentences only".into(),
            ));
        }
        let n = p.values.size();
        if self.memo_size != n {
            let (offsets, total) = self.program.memo_layout(n);
            self.offsets = offsets;
            self.memo = vec![0; total];
            self.memo_size = n;
        } else {
            self.memo.fill(0);
        }
        Ok(self.node(self.program.root, p))
    }

    fn node(&mut self, id: Id, p: &PartialStructure<'_>) -> Trit {
        let offset = self.offsets[id as usize];
        if offset == usize::MAX {
            return self.compute(id, p);
        }
        let n = p.values.size();
        let key = self.program.free[id as usize]
            .iter()
            .fold(0, |acc, &slot| acc * n + self.assign[slot as usize]);
        match self.memo[offset + key] {
            1 => Trit::False,
            2 => Trit::True,
            3 => Trit::Unknown,
            _ => {
                let v = self.compute(id, p);
                self.memo[offset + key] = match v {
                    Trit::False => 1,
                    Trit::True => 2,
                    Trit::Unknown => 3,
                };
                v
            }
        }
    }

    /// Counts of definite and undetermined witnesses, stopping once `stop_at`
    /// definite witnesses are found.
    fn count(
        &mut self,
        x: Slot,
        body: Id,
        p: &PartialStructure<'_>,
        stop_at: usize,
    ) -> (usize, usize) {
        let saved = self.assign[x as usize];
        let (mut yes, mut maybe) = (0, 0);
        for a in 0..p.values.size() {
            self.assign[x as usize] = a;
            match self.node(body, p) {
                Trit::True => {
                    yes += 1;
                    if yes >= stop_at {
                        break;
                    }
                }
                Trit::Unknown => maybe += 1,
                Trit::False => {}
            }
        }
        self.assign[x as usize] = saved;
        (yes, maybe)
    }

    fn and(&mut self, ids: impl IntoIterator<Item = Id>, p: &PartialStructure<'_>) -> Trit {
        let mut out = Trit::True;
        for id in ids {
            match self.node(id, p) {
                Trit::False => return Trit::False,
                Trit::Unknown => out = Trit::Unknown,
                Trit::True => {}
            }
        }
        out
    }

    fn or(&mut self, ids: impl IntoIterator<Item = Id>, p: &PartialStructure<'_>) -> Trit {
        let mut out = Trit::False;
        for id in ids {
            match self.node(id, p) {
                Trit::True => return Trit::True,
                Trit::Unknown => out = Trit::Unknown,
                Trit::False => {}
            }
        }
        out
    }

    fn compute(&mut self, id: Id, p: &PartialStructure<'_>) -> Trit {
        let program = self.program;
        let n = p.values.size();
        match &program.nodes[id as usize] {
            Node::True => Trit::True,
            Node::False => Trit::False,
            Node::Rel(r, args) => {
                let idx = args
                    .iter()
                    .fold(0, |acc, &a| acc * n + self.assign[a as usize]);
                p.bit(*r as usize, idx)
            }
            Node::Eq(a, b) => Trit::from_bool(self.assign[*a as usize] == self.assign[*b as usize]),
            Node::Not(a) => self.node(*a, p).not(),
            Node::And(a, b) => self.and([*a, *b], p),
            Node::Or(a, b) => self.or([*a, *b], p),
            Node::Implies(a, b) => match self.node(*a, p) {
                Trit::False => Trit::True,
                Trit::True => self.node(*b, p),
                Trit::Unknown => match self.node(*b, p) {
                    Trit::True => Trit::True,
                    _ => Trit::Unknown,
                },
            },
            Node::Iff(a, b) => match (self.node(*a, p), self.node(*b, p)) {
                (Trit::Unknown, _) | (_, Trit::Unknown) => Trit::Unknown,
                (x, y) => Trit::from_bool(x == y),
            },
            Node::All(xs) => self.and(xs.iter().copied(), p),
            Node::Any(xs) => self.or(xs.iter().copied(), p),
            Node::Exists(x, a) => threshold(self.count(*x, *a, p, 1), 1),
            Node::Forall(x, a) => {
                let saved = self.assign[*x as usize];
                let mut out = Trit::True;
                for e in 0..n {
                    self.assign[*x as usize] = e;
                    match self.node(*a, p) {
                        Trit::False => {
                            out = Trit::False;
                            break;
                        }
                        Trit::Unknown => out = Trit::Unknown,
                        Trit::True => {}
                    }
                }
                self.assign[*x as usize] = saved;
                out
            }
            Node::Count(k, x, a) => threshold(self.count(*x, *a, p, *k as usize), *k as usize),
            Node::Hartig(x, y, a, b) => {
                let (t1, u1) = self.count(*x, *a, p, usize::MAX);
                let (t2, u2) = self.count(*y, *b, p, usize::MAX);
                if u1 == 0 && u2 == 0 {
                    Trit::from_bool(t1 == t2)
                } else if t1 + u1 < t2 || t2 + u2 < t1 {
                    Trit::False
                } else {
                    Trit::Unknown
                }
            }
            Node::Rescher(x, y, a, b) => {
                let (t1, u1) = self.count(*x, *a, p, usize::MAX);
                let (t2, u2) = self.count(*y, *b, p, usize::MAX);
                if t1 >= t2 + u2 {
                    Trit::True
                } else if t1 + u1 < t2 {
                    Trit::False
                } else {
                    Trit::Unknown
                }
            }
            Node::WellOrder(x, y, a) => {
                let (rel, known) = self.defined_relation(&[*x, *y], *a, p);
                order_verdict(&rel, &known)
            }
            Node::Oracle(o, vars, a) => {
                let (rel, known) = self.defined_relation(vars, *a, p);
                if known.len() != known.slots() {
                    return Trit::Unknown;
                }
                let oracle = &program.oracles[*o as usize];
                let sym = &oracle.vocabulary().symbols()[0];
                let mut member = Structure::empty(oracle.vocabulary().clone(), n);
                member
                    .set_relation(&sym.name, rel)
                    .expect("arity checked at compile time");
                Trit::from_bool(oracle.contains(&member))
            }
        }
    }

    fn defined_relation(
        &mut self,
        vars: &[Slot],
        body: Id,
        p: &PartialStructure<'_>,
    ) -> (Relation, Relation) {
        let saved: Vec<usize> = vars.iter().map(|&v| self.assign[v as usize]).collect();
        let mut rel = Relation::empty(vars.len(), p.values.size());
        let mut known = Relation::empty(vars.len(), p.values.size());
        for i in 0..rel.slots() {
            let t = rel.tuple_at(i);
            for (&v, &a) in vars.iter().zip(&t) {
                self.assign[v as usize] = a;
            }
            match self.node(body, p) {
                Trit::True => {
                    rel.set_index(i, true);
                    known.set_index(i, true);
                }
                Trit::False => known.set_index(i, true),
                Trit::Unknown => {}
            }
        }
        for (&v, a) in vars.iter().zip(saved) {
            self.assign[v as usize] = a;
        }
        (rel, known)
    }
}

fn threshold((yes, maybe): (usize, usize), k: usize) -> Trit {
    if yes >= k {
        Trit::True
    } else if yes + maybe < k {
        Trit::False
    } else {
        Trit::Unknown
    }
}

/// Strict linear order test on a partially known binary relation. Definite
/// violations give `False`; otherwise `Unknown` until fully known.
fn order_verdict(rel: &Relation, known: &Relation) -> Trit {
    let n = rel.domain();
    if known.len() == known.slots() {
        return Trit::from_bool(super::is_strict_linear_order(rel));
    }
    let at = |a: usize, b: usize| {
        let i = a * n + b;
        if !known.get_index(i) {
            Trit::Unknown
        } else {
            Trit::from_bool(rel.get_index(i))
        }
    };
    for a in 0..n {
        if at(a, a) == Trit::True {
            return Trit::False;
        }
        for b in 0..n {
            if a == b {
                continue;
            }
            let (ab, ba) = (at(a, b), at(b, a));
            if (ab == Trit::False && ba == Trit::False) || (ab == Trit::True && ba == Trit::True) {
                return Trit::False;
            }
            if ab == Trit::True {
                for c in 0..n {
                    if at(b, c) == Trit::True && at(a, c) == Trit::False {
                        return Trit::False;
                    }
                }
            }
        }
    }
    Trit::Unknown
}

/// Depth-first search for a completion of the unknown tuples of the relations
/// at `free` (indices into the structure's relations, which start empty)
/// that satisfies the sentence. On success `values` holds the witness.
/// `budget` bounds the number of partial evaluations.
pub(crate) fn search_completion(
    program: &CompiledFormula,
    values: &mut Structure,
    free: &[usize],
    budget: u128,
) -> Result<bool> {
    let mut known: Vec<Option<Relation>> = vec![None; values.relations().len()];
    let mut cells = Vec::new();
    for &r in free {
        let rel = &values.relations()[r];
        known[r] = Some(Relation::empty(rel.arity(), rel.domain()));
        // Tuples over the same elements sit next to each other, fewest
        // distinct elements first, so constraints linking them (irreflexivity,
        // antisymmetry, totality) settle early.
        let mut order: Vec<(Vec<usize>, usize)> = (0..rel.slots())
            .map(|i| {
                let mut elems = rel.tuple_at(i);
                elems.sort_unstable();
                elems.dedup();
                (elems, i)
            })
            .collect();
        order.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.cmp(b)));
        cells.extend(order.into_iter().map(|(_, i)| (r, i)));
    }
    for &r in free {
        let (a, d) = (values.relations()[r].arity(), values.size());
        values.relations_mut()[r] = Relation::empty(a, d);
    }
    let mut eval = program.partial_evaluator();
    let mut visits = 0u128;
    let nominal = 1u128.checked_shl(cells.len() as u32).unwrap_or(u128::MAX);
    dfs(
        &mut eval,
        values,
        &mut known,
        &cells,
        0,
        &mut visits,
        budget,
        nominal,
    )
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    eval: &mut PartialEvaluator<'_>,
    values: &mut Structure,
    known: &mut [Option<Relation>],
    cells: &[(usize, usize)],
    depth: usize,
    visits: &mut u128,
    budget: u128,
    nominal: u128,
) -> Result<bool> {
    *visits += 1;
    if *visits > budget {
        return Err(Error::EnumerationLimit {
            count: nominal,
            budget,
        });
    }
    let verdict = eval.eval(&PartialStructure { values, known })?;
    match verdict {
        Trit::True => return Ok(true),
        Trit::False => return Ok(false),
        Trit::Unknown => {}
    }
    debug_assert!(!PartialStructure { values, known }.is_complete());
    let (r, i) = cells[depth];
    for bit in [false, true] {
        values.relations_mut()[r].set_index(i, bit);
        known[r].as_mut().expect("free relation").set_index(i, true);
        if dfs(
            eval,
            values,
            known,
            cells,
            depth + 1,
            visits,
            budget,
            nominal,
        )? {
            return Ok(true);
        }
    }
    values.relations_mut()[r].set_index(i, false);
    known[r]
        .as_mut()
        .expect("free relation")
        .set_index(i, false);
    Ok(false)
}
