//! Finite tree Kripke frames and their combinatorics: cones, upsets, node
//! signatures, and enumeration of trees up to isomorphism.
//!
//! Nodes are kept as dense indices internally; a frame remembers the caller's
//! original labels for I/O. Sets of nodes are bitmasks, which caps frames at
//! 64 nodes — far beyond anything the brute-force checkers can sweep anyway.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;
pub type NodeMask = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("frame has no nodes")]
    Empty,
    #[error("frame has {0} nodes; at most 64 are supported")]
    TooLarge(usize),
    #[error("duplicate node label {0}")]
    DuplicateNode(u64),
    #[error("order relation mentions unknown node label {0}")]
    UnknownNode(u64),
    #[error("not a partial order: nodes {0} and {1} lie on a cycle")]
    NotAntisymmetric(u64, u64),
    #[error("non-linear past: node {0} has incomparable predecessors {1} and {2}")]
    NonLinearPast(u64, u64, u64),
    #[error("no root: node {0} is minimal but not below node {1}")]
    NoRoot(u64, u64),
    #[error("declared root {0} is not below node {1}")]
    BadRoot(u64, u64),
}

/// JSON form of a frame: `{"nodes":[...], "le":[[a,b],...], "root": r}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameJson {
    pub nodes: Vec<u64>,
    pub le: Vec<(u64, u64)>,
    pub root: u64,
}

/// A finite tree partial order with a root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    labels: Vec<u64>,
    /// `up[v]` is the bitmask of all `w >= v` (including `v`).
    up: Vec<NodeMask>,
    root: NodeId,
    ends: NodeMask,
}

impl Frame {
    /// Validate order data and build a frame. The relation is closed under
    /// reflexivity and transitivity before the tree axioms are checked.
    pub fn validate(nodes: &[u64], le: &[(u64, u64)], root: Option<u64>) -> Result<Frame, FrameError> {
        let n = nodes.len();
        if n == 0 {
            return Err(FrameError::Empty);
        }
        if n > 64 {
            return Err(FrameError::TooLarge(n));
        }
        let mut index = std::collections::BTreeMap::new();
        for (i, &lab) in nodes.iter().enumerate() {
            if index.insert(lab, i).is_some() {
                return Err(FrameError::DuplicateNode(lab));
            }
        }
        let mut up = vec![0u64; n];
        for (i, up_i) in up.iter_mut().enumerate() {
            *up_i = 1 << i;
        }
        for &(a, b) in le {
            let ia = *index.get(&a).ok_or(FrameError::UnknownNode(a))?;
            let ib = *index.get(&b).ok_or(FrameError::UnknownNode(b))?;
            up[ia] |= 1 << ib;
        }
        // transitive closure
        loop {
            let mut changed = false;
            for v in 0..n {
                let mut acc = up[v];
                let mut rest = up[v];
                while rest != 0 {
                    let w = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    acc |= up[w];
                }
                if acc != up[v] {
                    up[v] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // antisymmetry
        for v in 0..n {
            for w in (v + 1)..n {
                if up[v] & (1 << w) != 0 && up[w] & (1 << v) != 0 {
                    return Err(FrameError::NotAntisymmetric(nodes[v], nodes[w]));
                }
            }
        }
        // linear pasts: predecessors of any node are pairwise comparable
        for v in 0..n {
            let below: Vec<NodeId> =
                (0..n).filter(|&w| up[w] & (1 << v) != 0 && w != v).collect();
            for (i, &a) in below.iter().enumerate() {
                for &b in &below[i + 1..] {
                    let cmp = up[a] & (1 << b) != 0 || up[b] & (1 << a) != 0;
                    if !cmp {
                        return Err(FrameError::NonLinearPast(nodes[v], nodes[a], nodes[b]));
                    }
                }
            }
        }
        // root
        let full: NodeMask = if n == 64 { !0 } else { (1u64 << n) - 1 };
        let root_idx = match root {
            Some(r) => {
                let ir = *index.get(&r).ok_or(FrameError::UnknownNode(r))?;
                if up[ir] != full {
                    let missing = (!up[ir] & full).trailing_zeros() as usize;
                    return Err(FrameError::BadRoot(r, nodes[missing]));
                }
                ir
            }
            None => {
                let ir = (0..n).find(|&v| up[v] == full);
                match ir {
                    Some(i) => i,
                    None => {
                        // name a minimal node and a node it misses
                        let min = (0..n)
                            .find(|&v| (0..n).all(|w| w == v || up[w] & (1 << v) == 0))
                            .unwrap_or(0);
                        let missing = (!up[min] & full).trailing_zeros() as usize;
                        return Err(FrameError::NoRoot(nodes[min], nodes[missing]));
                    }
                }
            }
        };
        let mut ends = 0u64;
        for v in 0..n {
            if up[v] == 1 << v {
                ends |= 1 << v;
            }
        }
        Ok(Frame { labels: nodes.to_vec(), up, root: root_idx, ends })
    }

    pub fn from_json(j: &FrameJson) -> Result<Frame, FrameError> {
        Frame::validate(&j.nodes, &j.le, Some(j.root))
    }

    pub fn to_json(&self) -> FrameJson {
        let mut le = Vec::new();
        for v in 0..self.len() {
            for w in self.iter_mask(self.up[v]) {
                le.push((self.labels[v], self.labels[w]));
            }
        }
        FrameJson { nodes: self.labels.clone(), le, root: self.labels[self.root] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.len()
    }

    pub fn label(&self, v: NodeId) -> u64 {
        self.labels[v]
    }

    pub fn index_of_label(&self, label: u64) -> Option<NodeId> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn full_mask(&self) -> NodeMask {
        if self.len() == 64 {
            !0
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn le(&self, v: NodeId, w: NodeId) -> bool {
        self.up[v] & (1 << w) != 0
    }

    /// `K^{>=v}` as a bitmask.
    pub fn cone(&self, v: NodeId) -> NodeMask {
        self.up[v]
    }

    pub fn cone_size(&self, v: NodeId) -> usize {
        self.up[v].count_ones() as usize
    }

    /// End-nodes (maximal nodes) of the whole frame.
    pub fn ends(&self) -> NodeMask {
        self.ends
    }

    pub fn is_end(&self, v: NodeId) -> bool {
        self.ends & (1 << v) != 0
    }

    /// `E_v`: end-nodes above `v`.
    pub fn ends_above(&self, v: NodeId) -> NodeMask {
        self.ends & self.up[v]
    }

    pub fn iter_mask(&self, mask: NodeMask) -> MaskIter {
        MaskIter { mask }
    }

    /// Immediate successors of `v`.
    pub fn covers(&self, v: NodeId) -> Vec<NodeId> {
        let strict = self.up[v] & !(1 << v);
        self.iter_mask(strict)
            .filter(|&w| {
                // nothing strictly between v and w
                let between = self.up[v] & !(1 << v) & !(1 << w);
                self.iter_mask(between).all(|u| self.up[u] & (1 << w) == 0)
            })
            .collect()
    }

    /// Parent of `v` (unique immediate predecessor), `None` at the root.
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        if v == self.root {
            return None;
        }
        // pasts are linear, so the strict predecessor with the smallest cone
        // is the immediate one
        self.nodes()
            .filter(|&w| w != v && self.le(w, v))
            .min_by_key(|&w| self.cone_size(w))
    }

    /// Nodes of `mask` in ascending index order.
    pub fn mask_to_vec(&self, mask: NodeMask) -> Vec<NodeId> {
        self.iter_mask(mask).collect()
    }

    pub fn mask_to_labels(&self, mask: NodeMask) -> Vec<u64> {
        self.iter_mask(mask).map(|v| self.labels[v]).collect()
    }

    /// Depth counted in nodes: a single point has depth 1.
    pub fn depth(&self) -> usize {
        self.nodes()
            .map(|v| self.nodes().filter(|&w| self.le(w, v)).count())
            .max()
            .unwrap_or(0)
    }

    /// All upsets of the cone `K^{>=v}`, as bitmasks, in a deterministic
    /// order: recursive products over the child subtrees (first child varies
    /// fastest), with the full cone appended last. `U_v` is the length.
    pub fn upsets(&self, v: NodeId) -> Vec<NodeMask> {
        let children: Vec<NodeId> = self
            .covers(v)
            .into_iter()
            .collect();
        let mut out = vec![0u64];
        for c in children {
            let child_upsets = self.upsets(c);
            let mut next = Vec::with_capacity(out.len() * child_upsets.len());
            for base in &out {
                for cu in &child_upsets {
                    next.push(base | cu);
                }
            }
            // first child varies fastest
            let mut reordered = Vec::with_capacity(next.len());
            let blocks = out.len();
            let per = child_upsets.len();
            for b in 0..per {
                for a in 0..blocks {
                    reordered.push(next[a * per + b]);
                }
            }
            out = reordered;
        }
        out.push(self.cone(v));
        out
    }

    /// `U_v`, the number of upsets of `K^{>=v}`.
    pub fn upset_count(&self, v: NodeId) -> usize {
        if self.is_end(v) {
            return 2;
        }
        self.covers(v).iter().map(|&c| self.upset_count(c)).product::<usize>() + 1
    }

    /// `(U_v, E_v)`.
    pub fn node_signature(&self, v: NodeId) -> (usize, NodeMask) {
        (self.upset_count(v), self.ends_above(v))
    }

    /// Whether `v -> (U_v, E_v)` is injective.
    pub fn signature_injective(&self) -> bool {
        let sigs: Vec<_> = self.nodes().map(|v| self.node_signature(v)).collect();
        for i in 0..sigs.len() {
            for j in (i + 1)..sigs.len() {
                if sigs[i] == sigs[j] {
                    return false;
                }
            }
        }
        true
    }

    /// Is `mask` upward closed in the whole frame?
    pub fn is_upset(&self, mask: NodeMask) -> bool {
        self.iter_mask(mask).all(|v| self.up[v] & !mask == 0)
    }

    /// Minimal elements of an upset.
    pub fn minimal_elements(&self, mask: NodeMask) -> Vec<NodeId> {
        self.iter_mask(mask)
            .filter(|&v| self.iter_mask(mask).all(|w| w == v || !self.le(w, v)))
            .collect()
    }

    /// The generated subframe on `K^{>=v}`, relabelled with the same labels.
    pub fn subframe(&self, v: NodeId) -> Frame {
        let keep = self.mask_to_vec(self.cone(v));
        let nodes: Vec<u64> = keep.iter().map(|&w| self.labels[w]).collect();
        let mut le = Vec::new();
        for &a in &keep {
            for &b in &keep {
                if self.le(a, b) {
                    le.push((self.labels[a], self.labels[b]));
                }
            }
        }
        Frame::validate(&nodes, &le, Some(self.labels[v])).expect("generated subframe is a tree")
    }
}

pub struct MaskIter {
    mask: NodeMask,
}

impl Iterator for MaskIter {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        if self.mask == 0 {
            None
        } else {
            let v = self.mask.trailing_zeros() as usize;
            self.mask &= self.mask - 1;
            Some(v)
        }
    }
}

// ---------------------------------------------------------------------------
// enumeration of rooted trees up to isomorphism
// ---------------------------------------------------------------------------

/// Canonical rooted unordered tree: children kept sorted descending, so two
/// trees are isomorphic iff their `CanonTree`s are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct CanonTree {
    children: Vec<CanonTree>,
}

impl CanonTree {
    fn size(&self) -> usize {
        1 + self.children.iter().map(CanonTree::size).sum::<usize>()
    }

    fn to_frame(&self) -> Frame {
        let mut parent: Vec<Option<usize>> = vec![None];
        fn walk(t: &CanonTree, me: usize, parent: &mut Vec<Option<usize>>) {
            for c in &t.children {
                let id = parent.len();
                parent.push(Some(me));
                walk(c, id, parent);
            }
        }
        walk(self, 0, &mut parent);
        let n = parent.len();
        let nodes: Vec<u64> = (0..n as u64).collect();
        let mut le = Vec::new();
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                le.push((*p as u64, v as u64));
            }
        }
        Frame::validate(&nodes, &le, Some(0)).expect("canonical tree is a tree")
    }
}

fn canon_trees_of_size(n: usize, cache: &mut Vec<Vec<CanonTree>>) -> Vec<CanonTree> {
    if n < cache.len() {
        return cache[n].clone();
    }
    for k in cache.len()..=n {
        let result = if k == 0 {
            vec![]
        } else if k == 1 {
            vec![CanonTree { children: vec![] }]
        } else {
            // children listed in non-increasing canonical order
            let mut out = Vec::new();
            let mut stack = Vec::new();
            fill_children(k - 1, None, &mut stack, &mut out, cache);
            out
        };
        cache.push(result);
    }
    cache[n].clone()
}

/// Extend `stack` (a non-increasing child list) with trees summing to
/// `remaining` nodes; `bound` caps each next child.
fn fill_children(
    remaining: usize,
    bound: Option<&CanonTree>,
    stack: &mut Vec<CanonTree>,
    out: &mut Vec<CanonTree>,
    cache: &mut Vec<Vec<CanonTree>>,
) {
    if remaining == 0 {
        out.push(CanonTree { children: stack.clone() });
        return;
    }
    for size in (1..=remaining).rev() {
        for t in canon_trees_of_size(size, cache) {
            if let Some(b) = bound {
                // keep children non-increasing under (size, structure) order
                if (t.size(), &t) > (b.size(), b) {
                    continue;
                }
            }
            stack.push(t.clone());
            fill_children(remaining - size, Some(&t), stack, out, cache);
            stack.pop();
        }
    }
}

/// All rooted trees with at most `max_size` nodes, one frame per isomorphism
/// class, ordered by size.
pub fn enumerate_trees(max_size: usize) -> Vec<Frame> {
    let mut cache = Vec::new();
    let mut out = Vec::new();
    for n in 1..=max_size {
        for t in canon_trees_of_size(n, &mut cache) {
            out.push(t.to_frame());
        }
    }
    out
}

/// Frame classes characterizing the intermediate logics of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameClass {
    /// All finite trees.
    AllTrees,
    /// Finite linear orders.
    Linear,
    /// Every non-end-node has exactly `n` immediate successors.
    Splitting(usize),
    /// Trees of depth at most `n` (a single point has depth 1).
    Depth(usize),
}

impl FrameClass {
    pub fn contains(&self, frame: &Frame) -> bool {
        match self {
            FrameClass::AllTrees => true,
            FrameClass::Linear => frame
                .nodes()
                .all(|v| frame.is_end(v) || frame.covers(v).len() == 1),
            FrameClass::Splitting(n) => frame
                .nodes()
                .all(|v| frame.is_end(v) || frame.covers(v).len() == *n),
            FrameClass::Depth(n) => frame.depth() <= *n,
        }
    }
}

/// Frames of the named class with at most `size_bound` nodes, up to
/// isomorphism.
pub fn enumerate_class(class: FrameClass, size_bound: usize) -> Vec<Frame> {
    enumerate_trees(size_bound)
        .into_iter()
        .filter(|f| class.contains(f))
        .collect()
}

/// A chain with `n` nodes, root at the bottom.
pub fn chain(n: usize) -> Frame {
    let nodes: Vec<u64> = (0..n as u64).collect();
    let mut le = Vec::new();
    for v in 0..n as u64 {
        for w in v..n as u64 {
            le.push((v, w));
        }
    }
    Frame::validate(&nodes, &le, Some(0)).expect("chain is a tree")
}

/// A root with `k` leaves directly above it.
pub fn star(k: usize) -> Frame {
    let nodes: Vec<u64> = (0..=k as u64).collect();
    let mut le = Vec::new();
    for leaf in 1..=k as u64 {
        le.push((0, leaf));
    }
    Frame::validate(&nodes, &le, Some(0)).expect("star is a tree")
}

/// The three-node fork: a root below two end-nodes.
pub fn fork() -> Frame {
    star(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fork_is_valid() {
        let f = fork();
        assert_eq!(f.len(), 3);
        assert_eq!(f.root(), 0);
        assert_eq!(f.ends().count_ones(), 2);
    }

    #[test]
    fn diamond_is_rejected_for_nonlinear_past() {
        // two midpoints below one top
        let err = Frame::validate(
            &[0, 1, 2, 3],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
            Some(0),
        )
        .unwrap_err();
        assert!(matches!(err, FrameError::NonLinearPast(3, _, _)));
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = Frame::validate(&[0, 1], &[(0, 1), (1, 0)], None).unwrap_err();
        assert!(matches!(err, FrameError::NotAntisymmetric(_, _)));
    }

    #[test]
    fn forest_without_root_is_rejected() {
        let err = Frame::validate(&[0, 1], &[], None).unwrap_err();
        assert!(matches!(err, FrameError::NoRoot(_, _)));
    }

    #[test]
    fn upsets_of_an_end_node() {
        let f = fork();
        let ups = f.upsets(1);
        assert_eq!(ups, vec![0, 1 << 1]);
        assert_eq!(f.upset_count(1), 2);
    }

    #[test]
    fn upsets_of_fork_root() {
        let f = fork();
        let ups = f.upsets(0);
        let e0 = 1u64 << 1;
        let e1 = 1u64 << 2;
        assert_eq!(ups, vec![0, e0, e1, e0 | e1, f.full_mask()]);
        assert_eq!(f.upset_count(0), 5);
    }

    #[test]
    fn upsets_of_chain_bottom() {
        let f = chain(2);
        assert_eq!(f.upsets(0).len(), 3);
        let f3 = chain(3);
        assert_eq!(f3.upset_count(0), 4);
    }

    /// Independent oracle: filter all subsets of the cone for upward closure.
    fn upsets_by_filter(f: &Frame, v: NodeId) -> Vec<NodeMask> {
        let cone = f.cone(v);
        let members: Vec<NodeId> = f.mask_to_vec(cone);
        let mut out = Vec::new();
        for bits in 0u64..(1 << members.len()) {
            let mut mask = 0u64;
            for (i, &m) in members.iter().enumerate() {
                if bits & (1 << i) != 0 {
                    mask |= 1 << m;
                }
            }
            if f.iter_mask(mask).all(|w| f.cone(w) & cone & !mask == 0) {
                out.push(mask);
            }
        }
        out
    }

    #[test]
    fn upsets_match_exhaustive_subset_filter() {
        for frame in enumerate_trees(6) {
            for v in frame.nodes() {
                let mut got = frame.upsets(v);
                let mut want = upsets_by_filter(&frame, v);
                got.sort_unstable();
                want.sort_unstable();
                assert_eq!(got, want);
                assert_eq!(frame.upset_count(v), want.len());
            }
        }
    }

    #[test]
    fn upsets_form_a_lattice() {
        for frame in enumerate_trees(5) {
            for v in frame.nodes() {
                let ups = frame.upsets(v);
                for &a in &ups {
                    for &b in &ups {
                        assert!(ups.contains(&(a | b)));
                        assert!(ups.contains(&(a & b)));
                    }
                }
            }
        }
    }

    #[test]
    fn fork_signatures_are_distinct() {
        let f = fork();
        let sig_root = f.node_signature(0);
        let sig_e0 = f.node_signature(1);
        let sig_e1 = f.node_signature(2);
        assert_eq!(sig_root.0, 5);
        assert_eq!(sig_e0, (2, 1 << 1));
        assert_eq!(sig_e1, (2, 1 << 2));
        assert!(f.signature_injective());
        assert_ne!(sig_root, sig_e0);
        assert_ne!(sig_e0, sig_e1);
    }

    #[test]
    fn chain_signatures() {
        let f = chain(3);
        let sigs: Vec<_> = f.nodes().map(|v| f.node_signature(v)).collect();
        assert_eq!(sigs[0].0, 4);
        assert_eq!(sigs[1].0, 3);
        assert_eq!(sigs[2].0, 2);
        assert!(sigs.iter().all(|s| s.1 == 1 << 2));
        assert!(f.signature_injective());
    }

    #[test]
    fn signatures_injective_on_small_trees() {
        for frame in enumerate_trees(6) {
            assert!(frame.signature_injective(), "failed on {:?}", frame.to_json());
        }
    }

    #[test]
    fn upset_counts_strictly_decrease_upwards() {
        for frame in enumerate_trees(6) {
            for v in frame.nodes() {
                for w in frame.nodes() {
                    if v != w && frame.le(v, w) {
                        assert!(frame.upset_count(v) > frame.upset_count(w));
                    }
                }
            }
        }
    }

    #[test]
    fn tree_counts_match_known_sequence() {
        let counts: Vec<usize> = (1..=5)
            .map(|n| enumerate_trees(n).iter().filter(|f| f.len() == n).count())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9]);
    }

    /// Brute-force oracle: enumerate parent arrays (each node's parent has a
    /// smaller index) and deduplicate by a canonical code.
    fn tree_count_by_brute_force(n: usize) -> usize {
        fn canon_code(children: &[Vec<usize>], v: usize) -> String {
            let mut codes: Vec<String> =
                children[v].iter().map(|&c| canon_code(children, c)).collect();
            codes.sort();
            format!("({})", codes.join(""))
        }
        let mut parents = vec![0usize; n];
        let mut seen = std::collections::BTreeSet::new();
        fn rec(
            i: usize,
            n: usize,
            parents: &mut Vec<usize>,
            seen: &mut std::collections::BTreeSet<String>,
        ) {
            if i == n {
                let mut children = vec![Vec::new(); n];
                for v in 1..n {
                    children[parents[v]].push(v);
                }
                seen.insert(canon_code(&children, 0));
                return;
            }
            for p in 0..i {
                parents[i] = p;
                rec(i + 1, n, parents, seen);
            }
        }
        if n == 1 {
            return 1;
        }
        rec(1, n, &mut parents, &mut seen);
        seen.len()
    }

    #[test]
    fn tree_counts_match_brute_force_oracle() {
        for n in 1..=5 {
            let got = enumerate_trees(n).iter().filter(|f| f.len() == n).count();
            assert_eq!(got, tree_count_by_brute_force(n), "size {n}");
        }
    }

    #[test]
    fn linear_class_is_chains() {
        let frames = enumerate_class(FrameClass::Linear, 3);
        assert_eq!(frames.len(), 3);
        for f in &frames {
            assert!(f.nodes().all(|v| f.is_end(v) || f.covers(v).len() == 1));
        }
    }

    #[test]
    fn splitting_two_up_to_three_nodes() {
        let frames = enumerate_class(FrameClass::Splitting(2), 3);
        // the single node and the fork
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[0].len(), 1);
        assert_eq!(frames[1].len(), 3);
    }

    #[test]
    fn depth_one_is_single_points() {
        let frames = enumerate_class(FrameClass::Depth(1), 4);
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].len(), 1);
    }

    #[test]
    fn covers_and_parents() {
        let f = chain(3);
        assert_eq!(f.covers(0), vec![1]);
        assert_eq!(f.covers(1), vec![2]);
        assert_eq!(f.parent(2), Some(1));
        assert_eq!(f.parent(0), None);
        let s = star(3);
        assert_eq!(s.covers(0), vec![1, 2, 3]);
        assert_eq!(s.parent(3), Some(0));
    }

    #[test]
    fn frame_json_round_trip() {
        let f = fork();
        let j = f.to_json();
        let back = Frame::from_json(&j).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn subframe_of_chain_is_chain() {
        let f = chain(3);
        let sub = f.subframe(1);
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.depth(), 2);
    }
}
