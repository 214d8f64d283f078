//! Hash-consed elements of a blended model.
//!
//! An element based at `v` assigns to every node `w >= v` a finite set of
//! elements based at `w`. Value sets are kept as sorted id vectors and every
//! element is interned once, so extensional identity is id equality — the
//! equality clause of the forcing relation is a pointer comparison.

use rustc_hash::FxHashMap as HashMap;

use crate::frames::{Frame, NodeId};

pub type ElemId = u32;

#[derive(Debug)]
pub(crate) struct ElemData {
    pub base: NodeId,
    /// One sorted member list per node of `cone(base)`, in ascending node
    /// order.
    pub vals: Vec<Vec<ElemId>>,
    /// Least `alpha` with the element in `D_base^alpha`.
    pub stratum: usize,
}

pub(crate) struct Arena {
    /// Sorted node lists of each cone, indexed by base node.
    cones: Vec<Vec<NodeId>>,
    /// `cone_pos[v][w]` = position of `w` in `cones[v]`, or `usize::MAX`.
    cone_pos: Vec<Vec<usize>>,
    elems: Vec<ElemData>,
    intern: HashMap<(NodeId, Vec<Vec<ElemId>>), ElemId>,
    restrict_cache: HashMap<(ElemId, NodeId), ElemId>,
}

impl Arena {
    pub fn new(frame: &Frame) -> Self {
        let n = frame.len();
        let mut cones = Vec::with_capacity(n);
        let mut cone_pos = Vec::with_capacity(n);
        for v in 0..n {
            let cone: Vec<NodeId> = frame.mask_to_vec(frame.cone(v));
            let mut pos = vec![usize::MAX; n];
            for (i, &w) in cone.iter().enumerate() {
                pos[w] = i;
            }
            cones.push(cone);
            cone_pos.push(pos);
        }
        Arena {
            cones,
            cone_pos,
            elems: Vec::new(),
            intern: HashMap::default(),
            restrict_cache: HashMap::default(),
        }
    }


    pub fn len(&self) -> usize {
        self.elems.len()
    }

    /// Intern an element; `vals` must be indexed by the cone order of `base`
    /// with each member list sorted and duplicate-free.
    pub fn intern(&mut self, base: NodeId, vals: Vec<Vec<ElemId>>) -> ElemId {
        debug_assert_eq!(vals.len(), self.cones[base].len());
        if let Some(&id) = self.intern.get(&(base, vals.clone())) {
            return id;
        }
        let stratum = 1 + vals
            .iter()
            .flat_map(|ms| ms.iter())
            .map(|&m| self.elems[m as usize].stratum)
            .max()
            .unwrap_or(0);
        let id = self.elems.len() as ElemId;
        self.elems.push(ElemData { base, vals: vals.clone(), stratum });
        self.intern.insert((base, vals), id);
        id
    }

    pub fn base(&self, id: ElemId) -> NodeId {
        self.elems[id as usize].base
    }

    pub fn stratum(&self, id: ElemId) -> usize {
        self.elems[id as usize].stratum
    }

    /// The member list `x(w)`; `w` must lie in the cone of the base.
    pub fn value_at(&self, id: ElemId, w: NodeId) -> &[ElemId] {
        let data = &self.elems[id as usize];
        let pos = self.cone_pos[data.base][w];
        debug_assert!(pos != usize::MAX, "node {w} not above base {}", data.base);
        &data.vals[pos]
    }

    /// Does `w` force `member in of`? Membership is the atomic clause.
    pub fn has_member(&self, of: ElemId, w: NodeId, member: ElemId) -> bool {
        self.value_at(of, w).binary_search(&member).is_ok()
    }

    /// The transition map `f_{base(id), w}`: restriction to `K^{>=w}`.
    pub fn restrict(&mut self, id: ElemId, w: NodeId) -> ElemId {
        let base = self.elems[id as usize].base;
        if base == w {
            return id;
        }
        if let Some(&r) = self.restrict_cache.get(&(id, w)) {
            return r;
        }
        let src_cone: Vec<NodeId> = self.cones[base].clone();
        let dst_cone: Vec<NodeId> = self.cones[w].clone();
        let mut vals = Vec::with_capacity(dst_cone.len());
        for &u in &dst_cone {
            let pos = self.cone_pos[base][u];
            debug_assert!(pos != usize::MAX, "cone of {w} must sit inside cone of {base}");
            vals.push(self.elems[id as usize].vals[pos].clone());
        }
        let _ = src_cone;
        let r = self.intern(w, vals);
        self.restrict_cache.insert((id, w), r);
        r
    }

    /// The empty-valued element based at `v` (the local empty set `0_v`).
    pub fn zero(&mut self, v: NodeId) -> ElemId {
        let vals = vec![Vec::new(); self.cones[v].len()];
        self.intern(v, vals)
    }

    /// Human-readable nested rendering, for reports and debugging.
    pub fn render(&self, frame: &Frame, id: ElemId) -> String {
        let data = &self.elems[id as usize];
        let mut parts = Vec::new();
        for (i, &w) in self.cones[data.base].iter().enumerate() {
            let inner: Vec<String> =
                data.vals[i].iter().map(|&m| self.render(frame, m)).collect();
            parts.push(format!("{}:{{{}}}", frame.label(w), inner.join(",")));
        }
        format!("[{}]", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::fork;

    #[test]
    fn interning_is_canonical() {
        let f = fork();
        let mut arena = Arena::new(&f);
        let z0 = arena.zero(0);
        let z0_again = arena.zero(0);
        assert_eq!(z0, z0_again);
        assert_eq!(arena.stratum(z0), 1);
        assert_eq!(arena.base(z0), 0);
    }

    #[test]
    fn restriction_is_cached_and_composes() {
        let f = fork();
        let mut arena = Arena::new(&f);
        let z_root = arena.zero(0);
        let z_e0 = arena.zero(1);
        let r = arena.restrict(z_root, 1);
        assert_eq!(r, z_e0);
        assert_eq!(arena.restrict(z_root, 0), z_root);
    }

    #[test]
    fn strata_grow_with_nesting() {
        let f = fork();
        let mut arena = Arena::new(&f);
        let z_root = arena.zero(0);
        let z_e0 = arena.zero(1);
        let z_e1 = arena.zero(2);
        // the element {0} at every node
        let one = arena.intern(0, vec![vec![z_root], vec![z_e0], vec![z_e1]]);
        assert_eq!(arena.stratum(one), 2);
    }
}
