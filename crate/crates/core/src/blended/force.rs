//! The forcing relation of a blended model.
//!
//! Formulas are compiled to a hash-consed node arena with de Bruijn levels;
//! results are memoized per (node, world, free-variable values) and closed
//! subsentences get a dedicated per-world cache, so repeated evaluation of
//! the same sentences across a sweep costs one lookup.
//!
//! Quantifier blocks are evaluated flattened. For a universal block
//! `forall x1..xk (A -> C)` the clauses give
//!
//! ```text
//! v |- forall x1..xk (A -> C)
//!   iff  for all w >= v and all tuples a in D_w^k:
//!          w |- A(a)  implies  w |- C(a)
//! ```
//!
//! because every node/tuple combination reachable through the nested
//! clauses is covered by choosing the final world outright, and the inner
//! implication's own world sweep is subsumed by the outer one. The sweep
//! binds one variable at a time and evaluates each conjunct of `A` (and
//! each disjunct of `C`) as soon as its variables are bound, pruning the
//! branch on a false conjunct or a true disjunct. A conjunct of the shape
//! `x in t` with `t` already bound narrows the candidate set for `x` from
//! the whole domain to the members of `t` — exactly the elements forcing
//! the guard. Candidates are drawn stratum by stratum, so an early witness
//! or counterexample never forces deep strata to materialize.

use rustc_hash::FxHashMap as HashMap;

use crate::formulas::SetFormula;
use crate::frames::NodeId;

use super::element::ElemId;
use super::model::{BlendError, BlendedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum CNode {
    Bottom,
    In(u16, u16),
    Eq(u16, u16),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
    All(u16, u32),
    Ex(u16, u32),
}

pub(crate) struct ForceEnv {
    pub values: Vec<ElemId>,
}

pub(crate) struct Evaluator {
    nodes: Vec<CNode>,
    intern: HashMap<CNode, u32>,
    /// Bitmask of free levels per node.
    free_mask: Vec<u64>,
    /// Highest free level, or -1 when closed.
    max_level: Vec<i32>,
    /// Memo for open nodes with one free level (the hot case in quantifier
    /// sweeps): (node, world, value).
    memo1: HashMap<(u32, NodeId, ElemId), bool>,
    /// Memo for open nodes: (node, world, values of free levels).
    memo: HashMap<(u32, NodeId, Vec<ElemId>), bool>,
    /// Closed nodes only need (node, world).
    sentence_cache: HashMap<(u32, NodeId), bool>,
    compiled: HashMap<(SetFormula, Vec<String>), u32>,
}

impl Evaluator {
    pub fn new() -> Self {
        Evaluator {
            nodes: Vec::new(),
            intern: HashMap::default(),
            free_mask: Vec::new(),
            max_level: Vec::new(),
            memo: HashMap::default(),
            memo1: HashMap::default(),
            sentence_cache: HashMap::default(),
            compiled: HashMap::default(),
        }
    }

    fn push(&mut self, node: CNode) -> u32 {
        if let Some(&id) = self.intern.get(&node) {
            return id;
        }
        let mask = match node {
            CNode::Bottom => 0,
            CNode::In(a, b) | CNode::Eq(a, b) => (1u64 << a) | (1u64 << b),
            CNode::And(a, b) | CNode::Or(a, b) | CNode::Imp(a, b) => {
                self.free_mask[a as usize] | self.free_mask[b as usize]
            }
            CNode::All(l, b) | CNode::Ex(l, b) => self.free_mask[b as usize] & !(1u64 << l),
        };
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.free_mask.push(mask);
        self.max_level.push(63 - (mask.leading_zeros() as i32).min(64));
        self.intern.insert(node, id);
        id
    }

    /// Compile a canonicalized formula; `free_names` fixes the level order of
    /// the free variables (level = position).
    pub fn compile(
        &mut self,
        phi: &SetFormula,
        free_names: &[String],
    ) -> Result<u32, BlendError> {
        let key = (phi.clone(), free_names.to_vec());
        if let Some(&id) = self.compiled.get(&key) {
            return Ok(id);
        }
        let mut scope: Vec<String> = free_names.to_vec();
        let id = self.compile_rec(phi, &mut scope)?;
        self.compiled.insert(key, id);
        Ok(id)
    }

    fn resolve(&self, scope: &[String], name: &str) -> Result<u16, BlendError> {
        scope
            .iter()
            .rposition(|s| s == name)
            .map(|p| p as u16)
            .ok_or_else(|| BlendError::UnboundVariable(name.to_string()))
    }

    fn compile_rec(
        &mut self,
        phi: &SetFormula,
        scope: &mut Vec<String>,
    ) -> Result<u32, BlendError> {
        Ok(match phi {
            SetFormula::Bottom => self.push(CNode::Bottom),
            SetFormula::In(x, y) => {
                let n = CNode::In(self.resolve(scope, x)?, self.resolve(scope, y)?);
                self.push(n)
            }
            SetFormula::Eq(x, y) => {
                let n = CNode::Eq(self.resolve(scope, x)?, self.resolve(scope, y)?);
                self.push(n)
            }
            SetFormula::And(a, b) => {
                let ca = self.compile_rec(a, scope)?;
                let cb = self.compile_rec(b, scope)?;
                self.push(CNode::And(ca, cb))
            }
            SetFormula::Or(a, b) => {
                let ca = self.compile_rec(a, scope)?;
                let cb = self.compile_rec(b, scope)?;
                self.push(CNode::Or(ca, cb))
            }
            SetFormula::Implies(a, b) => {
                let ca = self.compile_rec(a, scope)?;
                let cb = self.compile_rec(b, scope)?;
                self.push(CNode::Imp(ca, cb))
            }
            SetFormula::Forall(x, body) | SetFormula::Exists(x, body) => {
                let level = scope.len();
                if level >= 64 {
                    return Err(BlendError::TooManyLevels);
                }
                scope.push(x.clone());
                let cb = self.compile_rec(body, scope)?;
                scope.pop();
                let n = match phi {
                    SetFormula::Forall(_, _) => CNode::All(level as u16, cb),
                    _ => CNode::Ex(level as u16, cb),
                };
                self.push(n)
            }
        })
    }

    fn flatten_and(&self, c: u32, out: &mut Vec<u32>) {
        match self.nodes[c as usize] {
            CNode::And(a, b) => {
                self.flatten_and(a, out);
                self.flatten_and(b, out);
            }
            _ => out.push(c),
        }
    }

    fn flatten_or(&self, c: u32, out: &mut Vec<u32>) {
        match self.nodes[c as usize] {
            CNode::Or(a, b) => {
                self.flatten_or(a, out);
                self.flatten_or(b, out);
            }
            _ => out.push(c),
        }
    }

    /// Among `conjuncts`, find one of shape `In(level, t)` with `t` already
    /// bound; its members are exactly the candidates forcing it.
    fn membership_guard(&self, conjuncts: &[u32], level: u16) -> Option<u16> {
        for &c in conjuncts {
            if let CNode::In(a, t) = self.nodes[c as usize] {
                if a == level && t < level {
                    return Some(t);
                }
            }
        }
        None
    }

    fn memo_key(&self, c: u32, stack: &[ElemId]) -> Vec<ElemId> {
        let mut mask = self.free_mask[c as usize];
        let mut out = Vec::with_capacity(mask.count_ones() as usize);
        while mask != 0 {
            let l = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            out.push(stack[l]);
        }
        out
    }

    pub fn eval_root(
        model: &BlendedModel,
        program: u32,
        v: NodeId,
        env: ForceEnv,
    ) -> Result<bool, BlendError> {
        let mut ev = model.evaluator_mut();
        let mut stack = env.values;
        ev.eval(model, program, v, &mut stack)
    }

    fn eval(
        &mut self,
        model: &BlendedModel,
        c: u32,
        w: NodeId,
        stack: &mut Vec<ElemId>,
    ) -> Result<bool, BlendError> {
        match self.nodes[c as usize] {
            CNode::Bottom => Ok(false),
            CNode::In(a, b) => Ok(model.member_check(stack[b as usize], w, stack[a as usize])),
            CNode::Eq(a, b) => Ok(stack[a as usize] == stack[b as usize]),
            CNode::And(a, b) => Ok(self.eval(model, a, w, stack)? && self.eval(model, b, w, stack)?),
            CNode::Or(a, b) => Ok(self.eval(model, a, w, stack)? || self.eval(model, b, w, stack)?),
            CNode::Imp(_, _) | CNode::All(_, _) | CNode::Ex(_, _) => {
                let mask = self.free_mask[c as usize];
                let single = if mask == 0 {
                    None
                } else if mask.count_ones() == 1 {
                    Some(stack[mask.trailing_zeros() as usize])
                } else {
                    None
                };
                if mask == 0 {
                    if let Some(&r) = self.sentence_cache.get(&(c, w)) {
                        return Ok(r);
                    }
                } else if let Some(v) = single {
                    if let Some(&r) = self.memo1.get(&(c, w, v)) {
                        return Ok(r);
                    }
                } else if let Some(&r) = self.memo.get(&(c, w, self.memo_key(c, stack))) {
                    return Ok(r);
                }
                let r = match self.nodes[c as usize] {
                    CNode::Imp(a, b) => self.eval_imp(model, a, b, w, stack)?,
                    CNode::All(_, _) => self.eval_forall(model, c, w, stack)?,
                    CNode::Ex(_, _) => self.eval_exists(model, c, w, stack)?,
                    _ => unreachable!(),
                };
                if mask == 0 {
                    self.sentence_cache.insert((c, w), r);
                } else if let Some(v) = single {
                    self.memo1.insert((c, w, v), r);
                } else {
                    let key = self.memo_key(c, stack);
                    self.memo.insert((c, w, key), r);
                }
                Ok(r)
            }
        }
    }

    fn restricted_stack(
        &self,
        model: &BlendedModel,
        stack: &[ElemId],
        u: NodeId,
    ) -> Vec<ElemId> {
        stack
            .iter()
            .map(|&id| {
                if id == ElemId::MAX {
                    id // unbound placeholder slot, never read
                } else {
                    model.restrict_unchecked(id, u)
                }
            })
            .collect()
    }

    fn eval_imp(
        &mut self,
        model: &BlendedModel,
        a: u32,
        b: u32,
        w: NodeId,
        stack: &mut Vec<ElemId>,
    ) -> Result<bool, BlendError> {
        for &u in model.eval_order(w) {
            let mut stk = self.restricted_stack(model, stack, u);
            if self.eval(model, a, u, &mut stk)? && !self.eval(model, b, u, &mut stk)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn eval_forall(
        &mut self,
        model: &BlendedModel,
        c: u32,
        w: NodeId,
        stack: &mut Vec<ElemId>,
    ) -> Result<bool, BlendError> {
        // collect the maximal universal prefix
        let mut count = 0usize;
        let mut body = c;
        while let CNode::All(level, inner) = self.nodes[body as usize] {
            debug_assert_eq!(level as usize, stack.len() + count);
            count += 1;
            body = inner;
        }
        let base = stack.len();
        let (antecedents, consequents) = match self.nodes[body as usize] {
            CNode::Imp(a, cons) => {
                let mut antes = Vec::new();
                self.flatten_and(a, &mut antes);
                let mut conses = Vec::new();
                self.flatten_or(cons, &mut conses);
                (antes, conses)
            }
            _ => (Vec::new(), vec![body]),
        };
        'worlds: for &u in model.eval_order(w) {
            // pad with placeholder slots so subformula binders, compiled at
            // scope depth base + count, land at their absolute levels; slots
            // are only read once their variable is bound
            let mut stk = self.restricted_stack(model, stack, u);
            stk.resize(base + count, ElemId::MAX);
            // conjuncts/disjuncts not mentioning the prefix are fixed per world
            for &a in &antecedents {
                if self.max_level[a as usize] < base as i32
                    && !self.eval(model, a, u, &mut stk)?
                {
                    continue 'worlds;
                }
            }
            for &cons in &consequents {
                if self.max_level[cons as usize] < base as i32
                    && self.eval(model, cons, u, &mut stk)?
                {
                    continue 'worlds;
                }
            }
            if !self.forall_tuples(model, u, base, count, 0, &antecedents, &consequents, &mut stk)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Depth-first sweep of `D_u^count`; returns false when a tuple satisfies
    /// every antecedent but no consequent.
    #[allow(clippy::too_many_arguments)]
    fn forall_tuples(
        &mut self,
        model: &BlendedModel,
        u: NodeId,
        base: usize,
        count: usize,
        depth: usize,
        antecedents: &[u32],
        consequents: &[u32],
        stk: &mut Vec<ElemId>,
    ) -> Result<bool, BlendError> {
        if depth == count {
            return Ok(false);
        }
        let level = (base + depth) as u16;
        let guard = self.membership_guard(antecedents, level);
        let try_candidate = |ev: &mut Self, cand: ElemId, stk: &mut Vec<ElemId>| -> Result<bool, BlendError> {
            stk[level as usize] = cand;
            let mut prune = false;
            for &a in antecedents {
                if ev.max_level[a as usize] == level as i32 && !ev.eval(model, a, u, stk)? {
                    prune = true;
                    break;
                }
            }
            if !prune {
                for &cons in consequents {
                    if ev.max_level[cons as usize] == level as i32
                        && ev.eval(model, cons, u, stk)?
                    {
                        prune = true;
                        break;
                    }
                }
            }
            if prune {
                Ok(true)
            } else {
                ev.forall_tuples(model, u, base, count, depth + 1, antecedents, consequents, stk)
            }
        };
        if let Some(t) = guard {
            let members = model.value_list(stk[t as usize], u);
            for cand in members {
                if !try_candidate(self, cand, stk)? {
                    return Ok(false);
                }
            }
        } else {
            for alpha in 1..=model.rank() {
                let ids = model.stratum_list(u, alpha)?;
                for &cand in ids.iter() {
                    if !try_candidate(self, cand, stk)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    fn eval_exists(
        &mut self,
        model: &BlendedModel,
        c: u32,
        w: NodeId,
        stack: &mut Vec<ElemId>,
    ) -> Result<bool, BlendError> {
        let mut count = 0usize;
        let mut body = c;
        while let CNode::Ex(level, inner) = self.nodes[body as usize] {
            debug_assert_eq!(level as usize, stack.len() + count);
            count += 1;
            body = inner;
        }
        let base = stack.len();
        let mut conjuncts = Vec::new();
        self.flatten_and(body, &mut conjuncts);
        stack.resize(base + count, ElemId::MAX);
        let result = (|| {
            // conjuncts not mentioning the prefix decide the whole formula
            for &a in &conjuncts {
                if self.max_level[a as usize] < base as i32 && !self.eval(model, a, w, stack)? {
                    return Ok(false);
                }
            }
            self.exists_tuples(model, w, base, count, 0, &conjuncts, stack)
        })();
        stack.truncate(base);
        result
    }

    #[allow(clippy::too_many_arguments)]
    fn exists_tuples(
        &mut self,
        model: &BlendedModel,
        w: NodeId,
        base: usize,
        count: usize,
        depth: usize,
        conjuncts: &[u32],
        stk: &mut Vec<ElemId>,
    ) -> Result<bool, BlendError> {
        if depth == count {
            return Ok(true);
        }
        let level = (base + depth) as u16;
        let guard = self.membership_guard(conjuncts, level);
        let try_candidate = |ev: &mut Self, cand: ElemId, stk: &mut Vec<ElemId>| -> Result<bool, BlendError> {
            stk[level as usize] = cand;
            for &a in conjuncts {
                if ev.max_level[a as usize] == level as i32 && !ev.eval(model, a, w, stk)? {
                    return Ok(false);
                }
            }
            ev.exists_tuples(model, w, base, count, depth + 1, conjuncts, stk)
        };
        if let Some(t) = guard {
            let members = model.value_list(stk[t as usize], w);
            for cand in members {
                if try_candidate(self, cand, stk)? {
                    return Ok(true);
                }
            }
        } else {
            for alpha in 1..=model.rank() {
                let ids = model.stratum_list(w, alpha)?;
                for &cand in ids.iter() {
                    if try_candidate(self, cand, stk)? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}
