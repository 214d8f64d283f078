//! IPC forcing over finite tree frames, brute-force frame validity, and the
//! axiom schemes of the intermediate logics LC, T_n and BD_n.
//!
//! Forcing is computed through truth sets: the set of nodes forcing a formula
//! is assembled bottom-up from the truth sets of its subformulas, which makes
//! persistence structural rather than something to re-derive per node.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulas::PropFormula;
use crate::frames::{enumerate_class, Frame, FrameClass, NodeId, NodeMask};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropError {
    #[error("letter `{0}` has no assigned valuation")]
    MissingLetter(String),
    #[error("valuation of `{0}` is not an upset")]
    NotPersistent(String),
    #[error("valuation sweep needs {needed} valuations, over the budget of {budget}")]
    SweepBudget { needed: u128, budget: u64 },
    #[error("unknown node {0}")]
    UnknownNode(u64),
}

/// A persistent valuation: each letter is assigned an upset of the frame.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Valuation {
    map: BTreeMap<String, NodeMask>,
}

impl Valuation {
    pub fn new(frame: &Frame, map: BTreeMap<String, NodeMask>) -> Result<Self, PropError> {
        for (p, &mask) in &map {
            if !frame.is_upset(mask) {
                return Err(PropError::NotPersistent(p.clone()));
            }
        }
        Ok(Valuation { map })
    }

    pub fn mask(&self, letter: &str) -> Option<NodeMask> {
        self.map.get(letter).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &NodeMask)> {
        self.map.iter()
    }

    /// Render as letter -> sorted node labels.
    pub fn to_labels(&self, frame: &Frame) -> BTreeMap<String, Vec<u64>> {
        self.map
            .iter()
            .map(|(p, &mask)| (p.clone(), frame.mask_to_labels(mask)))
            .collect()
    }

    pub fn from_labels(
        frame: &Frame,
        labels: &BTreeMap<String, Vec<u64>>,
    ) -> Result<Self, PropError> {
        let mut map = BTreeMap::new();
        for (p, nodes) in labels {
            let mut mask = 0u64;
            for &lab in nodes {
                let idx = frame
                    .index_of_label(lab)
                    .ok_or(PropError::UnknownNode(lab))?;
                mask |= 1 << idx;
            }
            map.insert(p.clone(), mask);
        }
        Valuation::new(frame, map)
    }
}

/// The truth set of `phi`: the bitmask of nodes forcing it.
pub fn truth_mask(
    frame: &Frame,
    valuation: &Valuation,
    phi: &PropFormula,
) -> Result<NodeMask, PropError> {
    match phi {
        PropFormula::Bottom => Ok(0),
        PropFormula::Letter(p) => valuation
            .mask(p)
            .ok_or_else(|| PropError::MissingLetter(p.clone())),
        PropFormula::And(a, b) => {
            Ok(truth_mask(frame, valuation, a)? & truth_mask(frame, valuation, b)?)
        }
        PropFormula::Or(a, b) => {
            Ok(truth_mask(frame, valuation, a)? | truth_mask(frame, valuation, b)?)
        }
        PropFormula::Implies(a, b) => {
            let ta = truth_mask(frame, valuation, a)?;
            let tb = truth_mask(frame, valuation, b)?;
            Ok(implication_mask(frame, ta, tb))
        }
    }
}

/// `v` forces `a -> b` iff no `w >= v` forces `a` without `b`.
pub fn implication_mask(frame: &Frame, ta: NodeMask, tb: NodeMask) -> NodeMask {
    let bad = ta & !tb;
    let mut out = 0u64;
    for v in frame.nodes() {
        if frame.cone(v) & bad == 0 {
            out |= 1 << v;
        }
    }
    out
}

/// The forcing relation at a single node.
pub fn force_prop(
    frame: &Frame,
    valuation: &Valuation,
    node: NodeId,
    phi: &PropFormula,
) -> Result<bool, PropError> {
    Ok(truth_mask(frame, valuation, phi)? & (1 << node) != 0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Countermodel { valuation: Valuation, node: NodeId },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Brute-force frame validity: sweep every persistent valuation of the
/// letters occurring in `phi` (forcing depends on no others). The sweep size
/// is `U^L` for `U` upsets and `L` letters and is guarded by `sweep_budget`.
pub fn valid_in_frame(
    frame: &Frame,
    phi: &PropFormula,
    sweep_budget: u64,
) -> Result<Validity, PropError> {
    let letters: Vec<String> = phi.letters().into_iter().collect();
    let upsets = frame.upsets(frame.root());
    let needed = (upsets.len() as u128)
        .checked_pow(letters.len() as u32)
        .unwrap_or(u128::MAX);
    if needed > sweep_budget as u128 {
        return Err(PropError::SweepBudget { needed, budget: sweep_budget });
    }
    let mut choice = vec![0usize; letters.len()];
    loop {
        let mut map = BTreeMap::new();
        for (i, p) in letters.iter().enumerate() {
            map.insert(p.clone(), upsets[choice[i]]);
        }
        let valuation = Valuation { map };
        let mask = truth_mask(frame, &valuation, phi)?;
        if mask != frame.full_mask() {
            let node = (!mask & frame.full_mask()).trailing_zeros() as usize;
            return Ok(Validity::Countermodel { valuation, node });
        }
        // advance the odometer
        let mut i = 0;
        loop {
            if i == letters.len() {
                return Ok(Validity::Valid);
            }
            choice[i] += 1;
            if choice[i] < upsets.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Axiom schemes of Example-style intermediate logics, instantiated with
/// fresh distinct letters. Scheme validity on frames is equivalent to
/// validity of the letter instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxiomScheme {
    /// Dummett's scheme `(p -> q) | (q -> p)`.
    Lc,
    /// The Gabbay-de Jongh scheme for trees with `n`-fold splittings.
    T(usize),
    /// The bounded-depth scheme `beta_n`.
    Bd(usize),
}

pub fn axiom(scheme: AxiomScheme) -> PropFormula {
    match scheme {
        AxiomScheme::Lc => {
            let p = PropFormula::letter("p");
            let q = PropFormula::letter("q");
            PropFormula::or(
                PropFormula::implies(p.clone(), q.clone()),
                PropFormula::implies(q, p),
            )
        }
        AxiomScheme::T(n) => gabbay_de_jongh(n),
        AxiomScheme::Bd(n) => bounded_depth(n),
    }
}

/// `T_n`: over letters `p1 .. p(n+1)`,
/// `/\_k ((p_k -> \/_{j!=k} p_j) -> \/_{j!=k} p_j) -> \/_k p_k`.
fn gabbay_de_jongh(n: usize) -> PropFormula {
    assert!(n >= 1, "T_n is defined for n >= 1");
    let m = n + 1;
    let letter = |k: usize| PropFormula::letter(format!("p{}", k + 1));
    let others = |k: usize| {
        PropFormula::disj((0..m).filter(|&j| j != k).map(letter).collect())
    };
    let antecedent = PropFormula::conj(
        (0..m)
            .map(|k| {
                PropFormula::implies(
                    PropFormula::implies(letter(k), others(k)),
                    others(k),
                )
            })
            .collect(),
    );
    PropFormula::implies(antecedent, PropFormula::disj((0..m).map(letter).collect()))
}

/// `beta_1 = ((p1 -> q) -> p1) -> p1` (Peirce's law);
/// `beta_{n+1} = ((p_{n+1} -> beta_n) -> p_{n+1}) -> p_{n+1}`.
fn bounded_depth(n: usize) -> PropFormula {
    assert!(n >= 1, "BD_n is defined for n >= 1");
    let mut beta = {
        let p1 = PropFormula::letter("p1");
        let q = PropFormula::letter("q");
        PropFormula::implies(
            PropFormula::implies(PropFormula::implies(p1.clone(), q), p1.clone()),
            p1,
        )
    };
    for k in 2..=n {
        let pk = PropFormula::letter(format!("p{k}"));
        beta = PropFormula::implies(
            PropFormula::implies(PropFormula::implies(pk.clone(), beta), pk.clone()),
            pk,
        );
    }
    beta
}

/// Peirce's law, the `BD_1` axiom.
pub fn peirce() -> PropFormula {
    axiom(AxiomScheme::Bd(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MemberVerdict {
    /// Valid on every frame of the class up to the bound — evidence only.
    ValidUpToBound { frames_checked: usize },
    /// A definitive refutation.
    Countermodel { frame: Frame, valuation: Valuation, node: NodeId },
}

/// Check `phi` against every frame of the class with at most `size_bound`
/// nodes.
pub fn logic_member(
    class: FrameClass,
    phi: &PropFormula,
    size_bound: usize,
    sweep_budget: u64,
) -> Result<MemberVerdict, PropError> {
    let frames = enumerate_class(class, size_bound);
    let count = frames.len();
    for frame in frames {
        match valid_in_frame(&frame, phi, sweep_budget)? {
            Validity::Valid => {}
            Validity::Countermodel { valuation, node } => {
                return Ok(MemberVerdict::Countermodel { frame, valuation, node });
            }
        }
    }
    Ok(MemberVerdict::ValidUpToBound { frames_checked: count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::parse_prop;
    use crate::frames::{chain, enumerate_trees, fork, star};

    fn val(frame: &Frame, pairs: &[(&str, NodeMask)]) -> Valuation {
        let map = pairs.iter().map(|(p, m)| (p.to_string(), *m)).collect();
        Valuation::new(frame, map).unwrap()
    }

    #[test]
    fn fork_root_does_not_force_excluded_middle() {
        let f = fork();
        let v = val(&f, &[("p", 1 << 1)]); // V(p) = {e0}
        let em = parse_prop("p | ~p").unwrap();
        assert!(!force_prop(&f, &v, 0, &em).unwrap());
        assert!(force_prop(&f, &v, 1, &em).unwrap());
        assert!(force_prop(&f, &v, 2, &em).unwrap());
    }

    #[test]
    fn identity_implication_is_forced_everywhere() {
        for frame in enumerate_trees(4) {
            let ups = frame.upsets(frame.root());
            for &u in &ups {
                let v = val(&frame, &[("p", u)]);
                let phi = parse_prop("p -> p").unwrap();
                for node in frame.nodes() {
                    assert!(force_prop(&frame, &v, node, &phi).unwrap());
                }
            }
        }
    }

    #[test]
    fn peirce_fails_at_chain_bottom() {
        let f = chain(2);
        let v = val(&f, &[("p1", 1 << 1), ("q", 0)]);
        let phi = parse_prop("((p1 -> q) -> p1) -> p1").unwrap();
        assert!(!force_prop(&f, &v, 0, &phi).unwrap());
    }

    #[test]
    fn excluded_middle_valid_on_a_point() {
        let f = chain(1);
        let phi = parse_prop("p | ~p").unwrap();
        assert!(valid_in_frame(&f, &phi, 1_000).unwrap().is_valid());
    }

    #[test]
    fn lc_axiom_refuted_on_fork() {
        let f = fork();
        match valid_in_frame(&f, &axiom(AxiomScheme::Lc), 1_000_000).unwrap() {
            Validity::Countermodel { valuation, node } => {
                // the returned witness really is one
                assert!(!force_prop(&f, &valuation, node, &axiom(AxiomScheme::Lc)).unwrap());
            }
            Validity::Valid => panic!("LC should fail on the fork"),
        }
    }

    #[test]
    fn bd2_refuted_on_3_chain_but_valid_on_2_chain() {
        let beta2 = axiom(AxiomScheme::Bd(2));
        assert!(valid_in_frame(&chain(2), &beta2, 1_000_000).unwrap().is_valid());
        assert!(!valid_in_frame(&chain(3), &beta2, 1_000_000).unwrap().is_valid());
    }

    #[test]
    fn bd1_is_peirce_shape() {
        let b1 = axiom(AxiomScheme::Bd(1));
        assert_eq!(b1, parse_prop("((p1 -> q) -> p1) -> p1").unwrap());
    }

    #[test]
    fn lc_is_the_dummett_scheme() {
        assert_eq!(axiom(AxiomScheme::Lc), parse_prop("(p -> q) | (q -> p)").unwrap());
    }

    #[test]
    fn t1_and_lc_agree_on_small_trees() {
        let t1 = axiom(AxiomScheme::T(1));
        let lc = axiom(AxiomScheme::Lc);
        for frame in enumerate_trees(4) {
            let vt = valid_in_frame(&frame, &t1, 10_000_000).unwrap().is_valid();
            let vl = valid_in_frame(&frame, &lc, 10_000_000).unwrap().is_valid();
            assert_eq!(vt, vl, "disagree on {:?}", frame.to_json());
        }
    }

    #[test]
    fn t2_refuted_on_3_fork_valid_on_binary_splittings() {
        let t2 = axiom(AxiomScheme::T(2));
        assert!(!valid_in_frame(&star(3), &t2, 10_000_000).unwrap().is_valid());
        for frame in enumerate_class(FrameClass::Splitting(2), 3) {
            assert!(valid_in_frame(&frame, &t2, 10_000_000).unwrap().is_valid());
        }
    }

    #[test]
    fn lc_valid_on_linear_frames() {
        match logic_member(FrameClass::Linear, &axiom(AxiomScheme::Lc), 5, 10_000_000).unwrap() {
            MemberVerdict::ValidUpToBound { frames_checked } => assert_eq!(frames_checked, 5),
            MemberVerdict::Countermodel { .. } => panic!("LC valid on chains"),
        }
    }

    #[test]
    fn excluded_middle_refuted_on_the_2_chain() {
        let phi = parse_prop("p | ~p").unwrap();
        match logic_member(FrameClass::AllTrees, &phi, 2, 10_000).unwrap() {
            MemberVerdict::Countermodel { frame, .. } => assert_eq!(frame.len(), 2),
            MemberVerdict::ValidUpToBound { .. } => panic!("EM fails on the 2-chain"),
        }
    }

    #[test]
    fn beta2_valid_on_depth_2_class() {
        let beta2 = axiom(AxiomScheme::Bd(2));
        match logic_member(FrameClass::Depth(2), &beta2, 5, 10_000_000).unwrap() {
            MemberVerdict::ValidUpToBound { .. } => {}
            MemberVerdict::Countermodel { frame, .. } => {
                panic!("beta_2 refuted on {:?}", frame.to_json())
            }
        }
    }

    #[test]
    fn sweep_budget_guard_trips() {
        let f = star(3);
        let phi = parse_prop("a & b & c & d & e & f & g & h & i & j").unwrap();
        let err = valid_in_frame(&f, &phi, 100).unwrap_err();
        assert!(matches!(err, PropError::SweepBudget { .. }));
    }

    #[test]
    fn end_nodes_are_classical() {
        // at end-nodes forcing agrees with the truth table under the node's
        // own valuation bits
        let phis = [
            parse_prop("p | ~p").unwrap(),
            parse_prop("((p -> q) -> p) -> p").unwrap(),
            parse_prop("~(p & q) -> (~p | ~q)").unwrap(),
        ];
        for frame in enumerate_trees(4) {
            let ups = frame.upsets(frame.root());
            for &up in &ups {
                for &uq in &ups {
                    let v = val(&frame, &[("p", up), ("q", uq)]);
                    for e in frame.iter_mask(frame.ends()) {
                        for phi in &phis {
                            let forced = force_prop(&frame, &v, e, phi).unwrap();
                            let classical = classical_eval(phi, &[
                                ("p", up & (1 << e) != 0),
                                ("q", uq & (1 << e) != 0),
                            ]);
                            assert_eq!(forced, classical);
                        }
                    }
                }
            }
        }
    }

    fn classical_eval(phi: &PropFormula, env: &[(&str, bool)]) -> bool {
        match phi {
            PropFormula::Bottom => false,
            PropFormula::Letter(p) => env.iter().find(|(n, _)| n == p).unwrap().1,
            PropFormula::And(a, b) => classical_eval(a, env) && classical_eval(b, env),
            PropFormula::Or(a, b) => classical_eval(a, env) || classical_eval(b, env),
            PropFormula::Implies(a, b) => !classical_eval(a, env) || classical_eval(b, env),
        }
    }

    #[test]
    fn validity_is_monotone_under_generated_subframes() {
        let formulas = [
            axiom(AxiomScheme::Lc),
            axiom(AxiomScheme::Bd(2)),
            parse_prop("p | ~p").unwrap(),
        ];
        for frame in enumerate_trees(5) {
            for phi in &formulas {
                if valid_in_frame(&frame, phi, 10_000_000).unwrap().is_valid() {
                    for v in frame.nodes() {
                        let sub = frame.subframe(v);
                        assert!(valid_in_frame(&sub, phi, 10_000_000).unwrap().is_valid());
                    }
                }
            }
        }
    }
}
