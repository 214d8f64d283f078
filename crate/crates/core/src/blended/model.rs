//! Blended Kripke models: rank-stratified domains over a finite tree, built
//! top-down from classical end-node universes.
//!
//! Domains are materialized stratum by stratum and only on demand. The
//! stratum of an element is the least `alpha` admitting it; `D_v^alpha` is
//! the union of strata `1..=alpha`. At an end-node `e`, stratum `alpha`
//! holds the images of the universe elements of rank `alpha - 1`. At a
//! non-end node the stratum is enumerated as the coherent monotone
//! selections: a value set per cone node, end values drawn from the end
//! domains at the same rank, non-end values drawn from strictly lower
//! strata, and every parent-edge restriction contained in the child value.
//! A size estimate is checked against the element budget before anything is
//! enumerated; the double-exponential growth makes the guard mandatory.

use std::cell::RefCell;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::formulas::SetFormula;
use crate::frames::{Frame, NodeId, NodeMask};
use crate::universes::{members, rank as code_rank, SetCode, Universe};

use super::element::{Arena, ElemId};
use super::force::{Evaluator, ForceEnv};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlendError {
    #[error("end-node {0} has no universe assigned")]
    MissingUniverse(u64),
    #[error("node {0} is not an end-node but has a universe assigned")]
    UniverseAtInnerNode(u64),
    #[error("rank cutoff must be at least 1")]
    RankZero,
    #[error(
        "domain budget exceeded at node {node} rank {rank}: estimated {estimate} candidates, budget {budget}"
    )]
    Budget { node: u64, rank: usize, estimate: u128, budget: u64 },
    #[error("variable `{0}` is not bound in the environment")]
    UnboundVariable(String),
    #[error("element is based at node {actual}, expected {expected}")]
    NotBasedAt { expected: u64, actual: u64 },
    #[error("{0} is not an upset of the cone")]
    NotAnUpset(String),
    #[error("numeral {n} needs stratum {need}, over the rank cutoff {rank}")]
    NumeralOverCutoff { n: usize, need: usize, rank: usize },
    #[error("formula uses more than 64 variable levels")]
    TooManyLevels,
}

pub(crate) struct Inner {
    pub arena: Arena,
    /// `strata[v][alpha]` = ids of stratum exactly `alpha` (index 0 unused).
    /// Shared so quantifier sweeps can iterate without cloning.
    pub strata: Vec<Vec<Option<std::rc::Rc<Vec<ElemId>>>>>,
    /// Embedding tables per end node: universe code -> element id.
    pub embed: Vec<BTreeMap<SetCode, ElemId>>,
}

/// A rank-truncated blended model over a finite tree.
pub struct BlendedModel {
    frame: Frame,
    universes: BTreeMap<NodeId, Universe>,
    rank: usize,
    budget: u64,
    pub(crate) inner: RefCell<Inner>,
    evaluator: RefCell<Evaluator>,
    /// Cone nodes in evaluation order (smallest cones first, so end-nodes
    /// come before inner nodes), one list per node.
    eval_order: Vec<Vec<NodeId>>,
}

impl BlendedModel {
    /// Set up a model without materializing anything. Quantifier sweeps pull
    /// strata in lazily; `construct` materializes everything up front.
    pub fn new(
        frame: Frame,
        universes: BTreeMap<NodeId, Universe>,
        rank: usize,
        budget: u64,
    ) -> Result<Self, BlendError> {
        if rank == 0 {
            return Err(BlendError::RankZero);
        }
        for v in frame.nodes() {
            if frame.is_end(v) {
                if !universes.contains_key(&v) {
                    return Err(BlendError::MissingUniverse(frame.label(v)));
                }
            } else if universes.contains_key(&v) {
                return Err(BlendError::UniverseAtInnerNode(frame.label(v)));
            }
        }
        let n = frame.len();
        let inner = Inner {
            arena: Arena::new(&frame),
            strata: vec![vec![None; rank + 1]; n],
            embed: vec![BTreeMap::new(); n],
        };
        let mut eval_order = Vec::with_capacity(n);
        for v in 0..n {
            let mut cone: Vec<NodeId> = frame.mask_to_vec(frame.cone(v));
            cone.sort_by_key(|&w| (frame.cone_size(w), w));
            eval_order.push(cone);
        }
        Ok(BlendedModel {
            frame,
            universes,
            rank,
            budget,
            inner: RefCell::new(inner),
            evaluator: RefCell::new(Evaluator::new()),
            eval_order,
        })
    }

    /// Materialize every `D_v^alpha` for `alpha <= rank` up front, failing
    /// fast on the budget guard.
    pub fn construct(
        frame: Frame,
        universes: BTreeMap<NodeId, Universe>,
        rank: usize,
        budget: u64,
    ) -> Result<Self, BlendError> {
        let model = BlendedModel::new(frame, universes, rank, budget)?;
        for v in model.frame.nodes() {
            model.materialize(v, rank)?;
        }
        Ok(model)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn universe(&self, e: NodeId) -> Option<&Universe> {
        self.universes.get(&e)
    }

    pub fn universes(&self) -> &BTreeMap<NodeId, Universe> {
        &self.universes
    }

    pub(crate) fn eval_order(&self, v: NodeId) -> &[NodeId] {
        &self.eval_order[v]
    }

    // -- domains ------------------------------------------------------------

    /// Ensure strata `1..=alpha` of `v` exist; returns nothing, errors on
    /// budget.
    pub(crate) fn materialize(&self, v: NodeId, alpha: usize) -> Result<(), BlendError> {
        for a in 1..=alpha.min(self.rank) {
            self.materialize_stratum(v, a)?;
        }
        Ok(())
    }

    fn materialize_stratum(&self, v: NodeId, alpha: usize) -> Result<(), BlendError> {
        if self.inner.borrow().strata[v][alpha].is_some() {
            return Ok(());
        }
        if alpha > 1 {
            self.materialize_stratum(v, alpha - 1)?;
        }
        if self.frame.is_end(v) {
            let universe = &self.universes[&v];
            let codes: Vec<SetCode> = universe
                .carrier()
                .iter()
                .copied()
                .filter(|&c| code_rank(c) == alpha - 1)
                .collect();
            let ids: Vec<ElemId> = codes.iter().map(|&c| self.embed_code(v, c)).collect();
            self.inner.borrow_mut().strata[v][alpha] = Some(std::rc::Rc::new(ids));
            return Ok(());
        }
        // dependencies: non-end cone nodes one rank down, end cone nodes at
        // this rank
        let cone: Vec<NodeId> = self.frame.mask_to_vec(self.frame.cone(v));
        for &w in &cone {
            if self.frame.is_end(w) {
                self.materialize(w, alpha)?;
            } else if w != v {
                self.materialize(w, alpha - 1)?;
            }
        }
        if alpha > 1 {
            self.materialize(v, alpha - 1)?;
        }

        // budget estimate: product over ends of |D_e^alpha|, times product
        // over non-ends of 2^|D_w^{alpha-1}|
        let mut estimate: u128 = 1;
        for &w in &cone {
            let factor: u128 = if self.frame.is_end(w) {
                self.cumulative_len(w, alpha) as u128
            } else {
                let bits = self.cumulative_len(w, alpha - 1);
                if bits >= 96 {
                    u128::MAX
                } else {
                    1u128 << bits
                }
            };
            estimate = estimate.saturating_mul(factor.max(1));
        }
        if estimate > self.budget as u128 {
            return Err(BlendError::Budget {
                node: self.frame.label(v),
                rank: alpha,
                estimate,
                budget: self.budget,
            });
        }

        // ancestors first so parent values are fixed before children
        let mut order = cone.clone();
        order.sort_by_key(|&w| (usize::MAX - self.frame.cone_size(w), w));
        let mut pos_of = vec![usize::MAX; self.frame.len()];
        for (i, &w) in order.iter().enumerate() {
            pos_of[w] = i;
        }

        let mut chosen: Vec<Vec<ElemId>> = vec![Vec::new(); order.len()];
        let mut found: Vec<ElemId> = Vec::new();
        self.enumerate_assignments(v, alpha, &order, &pos_of, 0, &mut chosen, &mut found)?;
        found.sort_unstable();
        found.dedup();
        self.inner.borrow_mut().strata[v][alpha] = Some(std::rc::Rc::new(found));
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_assignments(
        &self,
        v: NodeId,
        alpha: usize,
        order: &[NodeId],
        pos_of: &[usize],
        pos: usize,
        chosen: &mut Vec<Vec<ElemId>>,
        found: &mut Vec<ElemId>,
    ) -> Result<(), BlendError> {
        if pos == order.len() {
            // assemble in ascending node order, as the arena expects
            let cone: Vec<NodeId> = self.frame.mask_to_vec(self.frame.cone(v));
            let vals: Vec<Vec<ElemId>> =
                cone.iter().map(|&w| chosen[pos_of[w]].clone()).collect();
            let mut inner = self.inner.borrow_mut();
            let id = inner.arena.intern(v, vals);
            if inner.arena.stratum(id) == alpha {
                found.push(id);
            }
            return Ok(());
        }
        let u = order[pos];
        // members of the parent's value restricted to u must appear in u's
        // value (the coherence condition along the covering edge)
        let required: Vec<ElemId> = if pos == 0 {
            Vec::new()
        } else {
            let p = self.frame.parent(u).expect("non-root cone node has a parent");
            let parent_members = chosen[pos_of[p]].clone();
            let mut req: Vec<ElemId> = {
                let mut inner = self.inner.borrow_mut();
                parent_members
                    .iter()
                    .map(|&m| inner.arena.restrict(m, u))
                    .collect()
            };
            req.sort_unstable();
            req.dedup();
            req
        };
        if self.frame.is_end(u) {
            let candidates = self.cumulative(u, alpha)?;
            for z in candidates {
                let value: Vec<ElemId> = {
                    let inner = self.inner.borrow();
                    inner.arena.value_at(z, u).to_vec()
                };
                if required.iter().all(|r| value.binary_search(r).is_ok()) {
                    chosen[pos] = value;
                    self.enumerate_assignments(v, alpha, order, pos_of, pos + 1, chosen, found)?;
                }
            }
        } else {
            let pool = self.cumulative(u, alpha - 1)?;
            // required elements always sit in the pool: restriction cannot
            // raise the stratum
            let free: Vec<ElemId> =
                pool.into_iter().filter(|id| required.binary_search(id).is_err()).collect();
            let subsets = 1u64 << free.len();
            for bits in 0..subsets {
                let mut value = required.clone();
                for (i, &id) in free.iter().enumerate() {
                    if bits & (1 << i) != 0 {
                        value.push(id);
                    }
                }
                value.sort_unstable();
                chosen[pos] = value;
                self.enumerate_assignments(v, alpha, order, pos_of, pos + 1, chosen, found)?;
            }
        }
        Ok(())
    }

    fn cumulative_len(&self, v: NodeId, alpha: usize) -> usize {
        let inner = self.inner.borrow();
        (1..=alpha.min(self.rank))
            .map(|a| inner.strata[v][a].as_ref().map(|s| s.len()).unwrap_or(0))
            .sum()
    }

    /// `D_v^alpha` as a list, lowest strata first.
    pub fn cumulative(&self, v: NodeId, alpha: usize) -> Result<Vec<ElemId>, BlendError> {
        let alpha = alpha.min(self.rank);
        self.materialize(v, alpha)?;
        let inner = self.inner.borrow();
        let mut out = Vec::new();
        for a in 1..=alpha {
            out.extend(inner.strata[v][a].as_ref().expect("materialized").iter().copied());
        }
        Ok(out)
    }

    /// The truncated domain `D_v = D_v^rank`.
    pub fn domain(&self, v: NodeId) -> Result<Vec<ElemId>, BlendError> {
        self.cumulative(v, self.rank)
    }

    /// Sizes of `D_v^alpha` for `alpha = 1..=rank`.
    pub fn domain_profile(&self, v: NodeId) -> Result<Vec<usize>, BlendError> {
        self.materialize(v, self.rank)?;
        Ok((1..=self.rank).map(|a| self.cumulative_len(v, a)).collect())
    }

    // -- elements -------------------------------------------------------------

    fn embed_code(&self, e: NodeId, code: SetCode) -> ElemId {
        if let Some(&id) = self.inner.borrow().embed[e].get(&code) {
            return id;
        }
        let member_ids: Vec<ElemId> = members(code).map(|m| self.embed_code(e, m)).collect();
        let mut sorted = member_ids;
        sorted.sort_unstable();
        let id = {
            let mut inner = self.inner.borrow_mut();
            inner.arena.intern(e, vec![sorted])
        };
        self.inner.borrow_mut().embed[e].insert(code, id);
        id
    }

    /// `f_e`: the canonical embedding of a universe element.
    pub fn embed(&self, e: NodeId, code: SetCode) -> Result<ElemId, BlendError> {
        if !self.frame.is_end(e) {
            return Err(BlendError::UniverseAtInnerNode(self.frame.label(e)));
        }
        Ok(self.embed_code(e, code))
    }

    /// `g = f_e^{-1}`: recover the universe element from an end-node element.
    pub fn project(&self, x: ElemId) -> Result<SetCode, BlendError> {
        let e = {
            let inner = self.inner.borrow();
            inner.arena.base(x)
        };
        if !self.frame.is_end(e) {
            return Err(BlendError::NotBasedAt {
                expected: u64::MAX,
                actual: self.frame.label(e),
            });
        }
        let member_ids: Vec<ElemId> = {
            let inner = self.inner.borrow();
            inner.arena.value_at(x, e).to_vec()
        };
        let mut code = 0u64;
        for m in member_ids {
            code |= 1 << self.project(m)?;
        }
        Ok(code)
    }

    /// Restriction `x |` to the cone of `w`, i.e. the transition map.
    pub fn restrict(&self, x: ElemId, w: NodeId) -> Result<ElemId, BlendError> {
        let base = self.elem_base(x);
        if !self.frame.le(base, w) {
            return Err(BlendError::NotBasedAt {
                expected: self.frame.label(base),
                actual: self.frame.label(w),
            });
        }
        Ok(self.inner.borrow_mut().arena.restrict(x, w))
    }

    pub fn elem_base(&self, x: ElemId) -> NodeId {
        self.inner.borrow().arena.base(x)
    }

    pub fn elem_stratum(&self, x: ElemId) -> usize {
        self.inner.borrow().arena.stratum(x)
    }

    pub fn elem_value(&self, x: ElemId, w: NodeId) -> Vec<ElemId> {
        self.inner.borrow().arena.value_at(x, w).to_vec()
    }

    pub fn render_elem(&self, x: ElemId) -> String {
        self.inner.borrow().arena.render(&self.frame, x)
    }

    /// The local empty set `0_v`.
    pub fn zero(&self, v: NodeId) -> ElemId {
        self.inner.borrow_mut().arena.zero(v)
    }

    /// Intern an element from explicit per-node member lists, as the witness
    /// constructions do. Missing nodes get empty values.
    pub fn intern_values(&self, v: NodeId, values: Vec<(NodeId, Vec<ElemId>)>) -> ElemId {
        let cone: Vec<NodeId> = self.frame.mask_to_vec(self.frame.cone(v));
        let mut map: BTreeMap<NodeId, Vec<ElemId>> = values.into_iter().collect();
        let vals: Vec<Vec<ElemId>> = cone
            .iter()
            .map(|w| {
                let mut ms = map.remove(w).unwrap_or_default();
                ms.sort_unstable();
                ms.dedup();
                ms
            })
            .collect();
        self.inner.borrow_mut().arena.intern(v, vals)
    }

    /// The numeral `n_v`, with `n_v(w) = {0_w, ..., (n-1)_w}`; needs stratum
    /// `n + 1 <= rank`.
    pub fn numeral(&self, v: NodeId, n: usize) -> Result<ElemId, BlendError> {
        if n + 1 > self.rank {
            return Err(BlendError::NumeralOverCutoff { n, need: n + 1, rank: self.rank });
        }
        let cone: Vec<NodeId> = self.frame.mask_to_vec(self.frame.cone(v));
        let mut vals = Vec::with_capacity(cone.len());
        for &w in &cone {
            let mut ms = Vec::with_capacity(n);
            for m in 0..n {
                ms.push(self.numeral(w, m)?);
            }
            ms.sort_unstable();
            vals.push(ms);
        }
        Ok(self.inner.borrow_mut().arena.intern(v, vals))
    }

    /// `1^v_X` for an upset `X` of the cone of `v`: value `{0_w}` on `X` and
    /// empty off it.
    pub fn one_of_upset(&self, v: NodeId, x_mask: NodeMask) -> Result<ElemId, BlendError> {
        let cone_mask = self.frame.cone(v);
        if x_mask & !cone_mask != 0 {
            return Err(BlendError::NotAnUpset(format!("{x_mask:b} leaves the cone")));
        }
        for w in self.frame.iter_mask(x_mask) {
            if self.frame.cone(w) & cone_mask & !x_mask != 0 {
                return Err(BlendError::NotAnUpset(format!("{x_mask:b}")));
            }
        }
        let cone: Vec<NodeId> = self.frame.mask_to_vec(cone_mask);
        let vals: Vec<Vec<ElemId>> = cone
            .iter()
            .map(|&w| {
                if x_mask & (1 << w) != 0 {
                    vec![self.zero(w)]
                } else {
                    Vec::new()
                }
            })
            .collect();
        Ok(self.inner.borrow_mut().arena.intern(v, vals))
    }

    // -- forcing --------------------------------------------------------------

    pub(crate) fn evaluator_mut(&self) -> std::cell::RefMut<'_, Evaluator> {
        self.evaluator.borrow_mut()
    }

    /// Membership clause: does `member` belong to `of(w)`?
    pub(crate) fn member_check(&self, of: ElemId, w: NodeId, member: ElemId) -> bool {
        self.inner.borrow().arena.has_member(of, w, member)
    }

    pub(crate) fn value_list(&self, of: ElemId, w: NodeId) -> Vec<ElemId> {
        self.inner.borrow().arena.value_at(of, w).to_vec()
    }

    pub(crate) fn restrict_unchecked(&self, id: ElemId, w: NodeId) -> ElemId {
        self.inner.borrow_mut().arena.restrict(id, w)
    }

    /// Ids of stratum exactly `alpha` at `v`, materializing on demand.
    pub(crate) fn stratum_list(
        &self,
        v: NodeId,
        alpha: usize,
    ) -> Result<std::rc::Rc<Vec<ElemId>>, BlendError> {
        self.materialize_stratum(v, alpha)?;
        Ok(self.inner.borrow().strata[v][alpha].as_ref().expect("materialized").clone())
    }

    /// The forcing relation at `v` under an environment of elements based at
    /// `v`.
    pub fn force(
        &self,
        v: NodeId,
        phi: &SetFormula,
        env: &[(String, ElemId)],
    ) -> Result<bool, BlendError> {
        for (_, id) in env {
            let base = self.elem_base(*id);
            if base != v {
                return Err(BlendError::NotBasedAt {
                    expected: self.frame.label(v),
                    actual: self.frame.label(base),
                });
            }
        }
        let canonical = phi.canonicalize();
        let program = {
            let names: Vec<String> = env.iter().map(|(n, _)| n.clone()).collect();
            self.evaluator.borrow_mut().compile(&canonical, &names)?
        };
        let force_env = ForceEnv { values: env.iter().map(|(_, id)| *id).collect() };
        Evaluator::eval_root(self, program, v, force_env)
    }

    /// Forcing of a sentence at `v`.
    pub fn force_sentence(&self, v: NodeId, phi: &SetFormula) -> Result<bool, BlendError> {
        self.force(v, phi, &[])
    }

    /// The truth set of a sentence as a node mask.
    pub fn truth_set(&self, phi: &SetFormula) -> Result<NodeMask, BlendError> {
        let mut mask = 0u64;
        for v in self.frame.nodes() {
            if self.force_sentence(v, phi)? {
                mask |= 1 << v;
            }
        }
        Ok(mask)
    }

    // -- validation -----------------------------------------------------------

    /// Re-validate conditions (i)-(iii) for every materialized element.
    pub fn validate_elements(&self) -> Result<(), String> {
        let ids: Vec<ElemId> = {
            let inner = self.inner.borrow();
            (0..inner.arena.len() as ElemId).collect()
        };
        for id in ids {
            let base = self.elem_base(id);
            let cone: Vec<NodeId> = self.frame.mask_to_vec(self.frame.cone(base));
            for &w in &cone {
                let vw = self.elem_value(id, w);
                // condition (ii)/(i): members live one stratum down
                for &m in &vw {
                    if self.elem_base(m) != w {
                        return Err(format!("member of {id} at {w} based elsewhere"));
                    }
                    if self.elem_stratum(m) >= self.elem_stratum(id) {
                        return Err(format!("member stratum does not drop for {id}"));
                    }
                }
                // condition (iii) for every pair, not just covering edges
                for &u in &cone {
                    if u == w || !self.frame.le(w, u) {
                        continue;
                    }
                    let vu = self.elem_value(id, u);
                    for &m in &vw {
                        let r = self.restrict(m, u).map_err(|e| e.to_string())?;
                        if vu.binary_search(&r).is_err() {
                            return Err(format!(
                                "restriction of member {m} of {id} missing at node {u}"
                            ));
                        }
                    }
                }
            }
            // condition (i): end-node restrictions correspond to universe
            // elements
            for e in self.frame.iter_mask(self.frame.ends_above(base)) {
                let r = self.restrict(id, e).map_err(|e| e.to_string())?;
                let code = self.project(r).map_err(|e| e.to_string())?;
                if !self.universes[&e].contains(code) {
                    return Err(format!("element {id} projects outside the universe at {e}"));
                }
            }
        }
        Ok(())
    }
}
