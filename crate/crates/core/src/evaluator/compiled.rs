//! Formulas compiled to a hash-consed DAG over variable slots.
//!
//! Each distinct variable name owns one slot; binders save and restore the
//! slot they rebind. The value of a node therefore depends only on the slots
//! of its free variables, so structurally equal subformulas share a node and
//! a node reached along several paths is memoized on its free-variable
//! values. Memo tables live in an [`Evaluator`] and are reset per structure.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evaluator::{ClassOracle, Env, QInterpretation};
use crate::structures::{Relation, Structure, Vocabulary};
use crate::syntax::{Formula, Threshold};

pub(super) type Id = u32;
pub(super) type Slot = u16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(super) enum Node {
    True,
    False,
    Rel(u16, Vec<Slot>),
    Eq(Slot, Slot),
    Not(Id),
    And(Id, Id),
    Or(Id, Id),
    Implies(Id, Id),
    Iff(Id, Id),
    All(Vec<Id>),
    Any(Vec<Id>),
    Exists(Slot, Id),
    Forall(Slot, Id),
    Count(u32, Slot, Id),
    Hartig(Slot, Slot, Id, Id),
    Rescher(Slot, Slot, Id, Id),
    WellOrder(Slot, Slot, Id),
    Oracle(u16, Vec<Slot>, Id),
}

/// Largest memo table (entries) kept for a single node.
const MEMO_CAP: usize = 1 << 12;

#[derive(Clone)]
pub struct CompiledFormula {
    pub(super) nodes: Vec<Node>,
    pub(super) free: Vec<Vec<Slot>>,
    memo: Vec<bool>,
    pub(super) root: Id,
    pub(super) slot_names: Vec<String>,
    /// Slots of the declared free variables, in declaration order.
    pub(super) params: Vec<Slot>,
    vocabulary: Arc<Vocabulary>,
    pub(super) oracles: Vec<ClassOracle>,
}

impl std::fmt::Debug for CompiledFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompiledFormula")
            .field("nodes", &self.nodes.len())
            .field("slots", &self.slot_names)
            .finish_non_exhaustive()
    }
}

struct Builder<'a> {
    vocabulary: &'a Vocabulary,
    env: &'a Env,
    nodes: Vec<Node>,
    free: Vec<Vec<Slot>>,
    parents: Vec<u32>,
    interned: HashMap<Node, Id>,
    by_ptr: HashMap<*const Formula, Id>,
    slots: HashMap<String, Slot>,
    slot_names: Vec<String>,
    oracles: Vec<ClassOracle>,
}

impl Builder<'_> {
    fn slot(&mut self, name: &str) -> Slot {
        if let Some(&s) = self.slots.get(name) {
            return s;
        }
        let s = self.slot_names.len() as Slot;
        self.slots.insert(name.to_string(), s);
        self.slot_names.push(name.to_string());
        s
    }

    fn intern(&mut self, node: Node) -> Id {
        if let Some(&id) = self.interned.get(&node) {
            return id;
        }
        let free = self.free_of(&node);
        let children: Vec<Id> = children_of(&node);
        for c in children {
            self.parents[c as usize] += 1;
        }
        let id = self.nodes.len() as Id;
        self.nodes.push(node.clone());
        self.free.push(free);
        self.parents.push(0);
        self.interned.insert(node, id);
        id
    }

    fn free_of(&self, node: &Node) -> Vec<Slot> {
        let mut out: Vec<Slot> = Vec::new();
        let mut add = |xs: &[Slot], bound: &[Slot]| {
            out.extend(xs.iter().filter(|s| !bound.contains(s)));
        };
        match node {
            Node::True | Node::False => {}
            Node::Rel(_, args) => add(args, &[]),
            Node::Eq(a, b) => add(&[*a, *b], &[]),
            Node::Not(a) => add(&self.free[*a as usize], &[]),
            Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => {
                add(&self.free[*a as usize], &[]);
                add(&self.free[*b as usize], &[]);
            }
            Node::All(xs) | Node::Any(xs) => {
                for x in xs {
                    add(&self.free[*x as usize], &[]);
                }
            }
            Node::Exists(x, a) | Node::Forall(x, a) | Node::Count(_, x, a) => {
                add(&self.free[*a as usize], &[*x])
            }
            Node::Hartig(x, y, a, b) | Node::Rescher(x, y, a, b) => {
                add(&self.free[*a as usize], &[*x]);
                add(&self.free[*b as usize], &[*y]);
            }
            Node::WellOrder(x, y, a) => add(&self.free[*a as usize], &[*x, *y]),
            Node::Oracle(_, vars, a) => add(&self.free[*a as usize], vars),
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn build(&mut self, f: &Formula) -> Result<Id> {
        let ptr = f as *const Formula;
        if let Some(&id) = self.by_ptr.get(&ptr) {
            return Ok(id);
        }
        let node = match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Rel(name, args) => {
                let idx = self.vocabulary.index_of(name).ok_or_else(|| {
                    Error::IllFormed(format!("relation `{name}` is not in {}", self.vocabulary))
                })?;
                let arity = self.vocabulary.symbols()[idx].arity;
                if arity != args.len() {
                    return Err(Error::IllFormed(format!(
                        "`{name}` applied to {} arguments, arity is {arity}",
                        args.len()
                    )));
                }
                Node::Rel(idx as u16, args.iter().map(|a| self.slot(a)).collect())
            }
            Formula::Equal(a, b) => Node::Eq(self.slot(a), self.slot(b)),
            Formula::Not(a) => Node::Not(self.build(a)?),
            Formula::And(a, b) => Node::And(self.build(a)?, self.build(b)?),
            Formula::Or(a, b) => Node::Or(self.build(a)?, self.build(b)?),
            Formula::Implies(a, b) => Node::Implies(self.build(a)?, self.build(b)?),
            Formula::Iff(a, b) => Node::Iff(self.build(a)?, self.build(b)?),
            Formula::BigAnd(xs) | Formula::BigOr(xs) => {
                if xs.is_empty() {
                    return Err(Error::IllFormed("empty big connective".into()));
                }
                let ids = xs
                    .iter()
                    .map(|x| self.build(x))
                    .collect::<Result<Vec<_>>>()?;
                if matches!(f, Formula::BigAnd(_)) {
                    Node::All(ids)
                } else {
                    Node::Any(ids)
                }
            }
            Formula::Exists(x, a) => Node::Exists(self.slot(x), self.build(a)?),
            Formula::Forall(x, a) => Node::Forall(self.slot(x), self.build(a)?),
            Formula::CountAtLeast(threshold, x, a) => {
                let k = match threshold {
                    Threshold::AtLeast(0) => {
                        return Err(Error::IllFormed("counting threshold 0".into()))
                    }
                    Threshold::AtLeast(k) => *k,
                    Threshold::Schematic => match self.env.q() {
                        Some(QInterpretation::CountThreshold(k)) if k >= 1 => k,
                        Some(other) => {
                            return Err(Error::IllFormed(format!(
                                "`Q` is unary; it cannot be bound to {other:?}"
                            )))
                        }
                        None => return Err(Error::UnboundQuantifier),
                    },
                };
                Node::Count(k, self.slot(x), self.build(a)?)
            }
            Formula::Hartig(x, y, a, b) => {
                Node::Hartig(self.slot(x), self.slot(y), self.build(a)?, self.build(b)?)
            }
            Formula::Rescher(x, y, a, b) => {
                Node::Rescher(self.slot(x), self.slot(y), self.build(a)?, self.build(b)?)
            }
            Formula::WellOrder(x, y, a) => {
                Node::WellOrder(self.slot(x), self.slot(y), self.build(a)?)
            }
            Formula::Oracle(name, vars, a) => {
                let oracle = self
                    .env
                    .oracle(name)
                    .ok_or_else(|| Error::UnresolvedOracle(name.clone()))?
                    .clone();
                let symbols = oracle.vocabulary().symbols();
                if symbols.len() != 1 || symbols[0].arity != vars.len() {
                    return Err(Error::IllFormed(format!(
                        "class `{name}` over {} cannot bind {} variables",
                        oracle.vocabulary(),
                        vars.len()
                    )));
                }
                let idx = match self.oracles.iter().position(|o| o.name() == name) {
                    Some(i) => i,
                    None => {
                        self.oracles.push(oracle);
                        self.oracles.len() - 1
                    }
                };
                let slots = vars.iter().map(|v| self.slot(v)).collect();
                Node::Oracle(idx as u16, slots, self.build(a)?)
            }
        };
        let id = self.intern(node);
        self.by_ptr.insert(ptr, id);
        Ok(id)
    }
}

fn children_of(node: &Node) -> Vec<Id> {
    match node {
        Node::True | Node::False | Node::Rel(..) | Node::Eq(..) => vec![],
        Node::Not(a)
        | Node::Exists(_, a)
        | Node::Forall(_, a)
        | Node::Count(_, _, a)
        | Node::WellOrder(_, _, a)
        | Node::Oracle(_, _, a) => vec![*a],
        Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => vec![*a, *b],
        Node::Hartig(_, _, a, b) | Node::Rescher(_, _, a, b) => vec![*a, *b],
        Node::All(xs) | Node::Any(xs) => xs.clone(),
    }
}

impl CompiledFormula {
    /// Compiles `f` against `vocabulary`. Every free variable of `f` must be
    /// listed in `free`; those become the parameters of [`Evaluator::eval_with`].
    pub fn compile(f: &Formula, vocabulary: &Vocabulary, env: &Env, free: &[&str]) -> Result<Self> {
        let mut b = Builder {
            vocabulary,
            env,
            nodes: Vec::new(),
            free: Vec::new(),
            parents: Vec::new(),
            interned: HashMap::new(),
            by_ptr: HashMap::new(),
            slots: HashMap::new(),
            slot_names: Vec::new(),
            oracles: Vec::new(),
        };
        let params: Vec<Slot> = free.iter().map(|v| b.slot(v)).collect();
        let root = b.build(f)?;
        let unbound: Vec<String> = b.free[root as usize]
            .iter()
            .filter(|s| !params.contains(s))
            .map(|&s| b.slot_names[s as usize].clone())
            .collect();
        if !unbound.is_empty() {
            return Err(Error::FreeVariables(unbound));
        }
        let memo = b
            .nodes
            .iter()
            .zip(&b.parents)
            .map(|(node, &p)| {
                p >= 2
                    && !matches!(
                        node,
                        Node::True | Node::False | Node::Rel(..) | Node::Eq(..)
                    )
            })
            .collect();
        Ok(CompiledFormula {
            nodes: b.nodes,
            free: b.free,
            memo,
            root,
            slot_names: b.slot_names,
            params,
            vocabulary: Arc::new(vocabulary.clone()),
            oracles: b.oracles,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    /// Number of distinct DAG nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator {
            program: self,
            assign: vec![0; self.slot_names.len()],
            memo: Vec::new(),
            offsets: Vec::new(),
            memo_size: usize::MAX,
        }
    }

    pub(super) fn check_structure(&self, s: &Structure) -> Result<()> {
        if s.size() == 0 {
            return Err(Error::EmptyDomain);
        }
        if !Arc::ptr_eq(s.shared_vocabulary(), &self.vocabulary)
            && s.vocabulary() != &*self.vocabulary
        {
            return Err(Error::Vocabulary(format!(
                "formula compiled for {}, structure is over {}",
                self.vocabulary,
                s.vocabulary()
            )));
        }
        Ok(())
    }

    /// Offsets of the memo tables for domain size `n` (`usize::MAX` for
    /// unmemoized nodes) and their total length.
    pub(super) fn memo_layout(&self, n: usize) -> (Vec<usize>, usize) {
        let mut offsets = Vec::with_capacity(self.nodes.len());
        let mut total = 0;
        for (i, &m) in self.memo.iter().enumerate() {
            let width = n
                .checked_pow(self.free[i].len() as u32)
                .unwrap_or(usize::MAX);
            if m && width <= MEMO_CAP {
                offsets.push(total);
                total += width;
            } else {
                offsets.push(usize::MAX);
            }
        }
        (offsets, total)
    }

    /// One-shot evaluation of a sentence.
    pub fn eval(&self, s: &Structure) -> Result<bool> {
        self.evaluator().eval(s)
    }
}

/// Reusable evaluation state for one compiled formula.
pub struct Evaluator<'a> {
    program: &'a CompiledFormula,
    assign: Vec<usize>,
    memo: Vec<u8>,
    offsets: Vec<usize>,
    /// Domain size the memo layout was computed for.
    memo_size: usize,
}

impl Evaluator<'_> {
    pub fn eval(&mut self, s: &Structure) -> Result<bool> {
        self.eval_with(s, &[])
    }

    /// Evaluates with the declared free variables bound to `values`.
    pub fn eval_with(&mut self, s: &Structure, values: &[usize]) -> Result<bool> {
        self.prepare(s)?;
        if values.len() != self.program.params.len() {
            return Err(Error::DimensionMismatch {
                expected: self.program.params.len(),
                found: values.len(),
            });
        }
        if let Some(&v) = values.iter().find(|&&v| v >= s.size()) {
            return Err(Error::InvalidStructure(format!(
                "element {v} outside domain of size {}",
                s.size()
            )));
        }
        for (&slot, &v) in self.program.params.iter().zip(values) {
            self.assign[slot as usize] = v;
        }
        Ok(self.node(self.program.root, s))
    }

    /// Every assignment to the declared free variables, as a relation.
    pub fn satisfying(&mut self, s: &Structure) -> Result<Relation> {
        self.prepare(s)?;
        let k = self.program.params.len();
        let mut out = Relation::empty(k, s.size());
        for i in 0..out.slots() {
            let t = out.tuple_at(i);
            for (&slot, &v) in self.program.params.iter().zip(&t) {
                self.assign[slot as usize] = v;
            }
            if self.node(self.program.root, s) {
                out.set_index(i, true);
            }
        }
        Ok(out)
    }

    fn prepare(&mut self, s: &Structure) -> Result<()> {
        self.program.check_structure(s)?;
        let n = s.size();
        if self.memo_size != n {
            let (offsets, total) = self.program.memo_layout(n);
            self.offsets = offsets;
            self.memo = vec![0; total];
            self.memo_size = n;
        } else {
            self.memo.fill(0);
        }
        Ok(())
    }

    fn node(&mut self, id: Id, s: &Structure) -> bool {
        let offset = self.offsets[id as usize];
        if offset == usize::MAX {
            return self.compute(id, s);
        }
        let n = s.size();
        let key = self.program.free[id as usize]
            .iter()
            .fold(0, |acc, &slot| acc * n + self.assign[slot as usize]);
        match self.memo[offset + key] {
            1 => false,
            2 => true,
            _ => {
                let v = self.compute(id, s);
                self.memo[offset + key] = 1 + v as u8;
                v
            }
        }
    }

    fn count(&mut self, x: Slot, body: Id, s: &Structure, stop_at: usize) -> usize {
        let saved = self.assign[x as usize];
        let mut hits = 0;
        for a in 0..s.size() {
            self.assign[x as usize] = a;
            if self.node(body, s) {
                hits += 1;
                if hits >= stop_at {
                    break;
                }
            }
        }
        self.assign[x as usize] = saved;
        hits
    }

    fn compute(&mut self, id: Id, s: &Structure) -> bool {
        let program = self.program;
        let n = s.size();
        match &program.nodes[id as usize] {
            Node::True => true,
            Node::False => false,
            Node::Rel(r, args) => {
                let idx = args
                    .iter()
                    .fold(0, |acc, &a| acc * n + self.assign[a as usize]);
                s.relations()[*r as usize].get_index(idx)
            }
            Node::Eq(a, b) => self.assign[*a as usize] == self.assign[*b as usize],
            Node::Not(a) => !self.node(*a, s),
            Node::And(a, b) => self.node(*a, s) && self.node(*b, s),
            Node::Or(a, b) => self.node(*a, s) || self.node(*b, s),
            Node::Implies(a, b) => !self.node(*a, s) || self.node(*b, s),
            Node::Iff(a, b) => self.node(*a, s) == self.node(*b, s),
            Node::All(xs) => xs.iter().all(|&x| self.node(x, s)),
            Node::Any(xs) => xs.iter().any(|&x| self.node(x, s)),
            Node::Exists(x, a) => self.count(*x, *a, s, 1) >= 1,
            Node::Forall(x, a) => {
                let saved = self.assign[*x as usize];
                let mut ok = true;
                for e in 0..n {
                    self.assign[*x as usize] = e;
                    if !self.node(*a, s) {
                        ok = false;
                        break;
                    }
                }
                self.assign[*x as usize] = saved;
                ok
            }
            Node::Count(k, x, a) => {
                let k = *k as usize;
                k <= n && self.count(*x, *a, s, k) >= k
            }
            Node::Hartig(x, y, a, b) => {
                self.count(*x, *a, s, usize::MAX) == self.count(*y, *b, s, usize::MAX)
            }
            Node::Rescher(x, y, a, b) => {
                self.count(*x, *a, s, usize::MAX) >= self.count(*y, *b, s, usize::MAX)
            }
            Node::WellOrder(x, y, a) => {
                let rel = self.defined_relation(&[*x, *y], *a, s);
                is_strict_linear_order(&rel)
            }
            Node::Oracle(o, vars, a) => {
                let rel = self.defined_relation(vars, *a, s);
                let oracle = &program.oracles[*o as usize];
                let sym = &oracle.vocabulary().symbols()[0];
                let mut member = Structure::empty(oracle.vocabulary().clone(), n);
                member
                    .set_relation(&sym.name, rel)
                    .expect("arity checked at compile time");
                oracle.contains(&member)
            }
        }
    }

    fn defined_relation(&mut self, vars: &[Slot], body: Id, s: &Structure) -> Relation {
        let saved: Vec<usize> = vars.iter().map(|&v| self.assign[v as usize]).collect();
        let mut rel = Relation::empty(vars.len(), s.size());
        for i in 0..rel.slots() {
            let t = rel.tuple_at(i);
            for (&v, &a) in vars.iter().zip(&t) {
                self.assign[v as usize] = a;
            }
            if self.node(body, s) {
                rel.set_index(i, true);
            }
        }
        for (&v, a) in vars.iter().zip(saved) {
            self.assign[v as usize] = a;
        }
        rel
    }
}

/// Irreflexive, transitive and total on distinct elements.
pub(crate) fn is_strict_linear_order(rel: &Relation) -> bool {
    let n = rel.domain();
    let r = |a: usize, b: usize| rel.get_index(a * n + b);
    for a in 0..n {
        if r(a, a) {
            return false;
        }
        for b in 0..n {
            if a != b && !r(a, b) && !r(b, a) {
                return false;
            }
            if r(a, b) {
                for c in 0..n {
                    if r(b, c) && !r(a, c) {
                        return false;
                    }
                }
            }
        }
    }
    true
}
