//! The end-to-end countermodel pipeline: search a logic's characteristic
//! frame class for a propositional countermodel, blend distinguishing
//! universes over the frame, build the faithful substitution, and certify
//! that the substituted sentence fails where the propositional formula does.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::blended::BlendedModel;
use crate::formulas::{ordinal_sentence, PropFormula, SetFormula};
use crate::frames::{Frame, FrameClass, NodeId};
use crate::propositional::{
    axiom, force_prop, valid_in_frame, AxiomScheme, Validity, Valuation,
};
use crate::universes::Universe;

use super::{
    correspondence_check, counting_check, distinguishing_family, faithful_substitution,
    CorrespondenceReport, DejonghError, Distinguishers,
};

/// Intermediate logics the pipeline can search against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Logic {
    Ipc,
    Lc,
    T(usize),
    Bd(usize),
}

impl Logic {
    /// The frame class characterizing the logic.
    pub fn frame_class(&self) -> FrameClass {
        match self {
            Logic::Ipc => FrameClass::AllTrees,
            Logic::Lc => FrameClass::Linear,
            Logic::T(n) => FrameClass::Splitting(*n),
            Logic::Bd(n) => FrameClass::Depth(*n),
        }
    }

    /// The axiom scheme instance extending IPC to this logic, if any.
    pub fn axiom(&self) -> Option<PropFormula> {
        match self {
            Logic::Ipc => None,
            Logic::Lc => Some(axiom(AxiomScheme::Lc)),
            Logic::T(n) => Some(axiom(AxiomScheme::T(*n))),
            Logic::Bd(n) => Some(axiom(AxiomScheme::Bd(*n))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Logic::Ipc => "IPC".into(),
            Logic::Lc => "LC".into(),
            Logic::T(n) => format!("T{n}"),
            Logic::Bd(n) => format!("BD{n}"),
        }
    }
}

/// Everything needed to replay a countermodel certificate.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub logic: Logic,
    pub formula: PropFormula,
    pub frame: Frame,
    pub valuation: Valuation,
    pub failing_node: NodeId,
    /// End-node label -> universe used there.
    pub universes: BTreeMap<u64, Universe>,
    pub rank: usize,
    /// Letter -> substituted sentence.
    pub sigma: BTreeMap<String, SetFormula>,
    pub phi_sigma: SetFormula,
    pub correspondence: CorrespondenceReport,
    /// Truth sets of each subformula instance agree on both sides.
    pub subformulas_checked: usize,
}

#[derive(Debug)]
pub enum PipelineOutcome {
    Certificate(Box<Certificate>),
    /// Validity on every frame of the class up to the bound is evidence, not
    /// a proof of derivability.
    NotRefutedUpToBound { frames_checked: usize },
}

fn subformulas(phi: &PropFormula, out: &mut Vec<PropFormula>) {
    out.push(phi.clone());
    match phi {
        PropFormula::Bottom | PropFormula::Letter(_) => {}
        PropFormula::And(a, b) | PropFormula::Or(a, b) | PropFormula::Implies(a, b) => {
            subformulas(a, out);
            subformulas(b, out);
        }
    }
}

/// Blend distinguishing universes over the frame. Heights `k_i = i + 2`
/// drive the default family; when three end-nodes would need a fourth
/// cumulative level (whose non-end domains overrun any budget), the
/// count-based family of equal-height carriers is used instead.
pub fn blend_over(
    frame: &Frame,
    budget: u64,
) -> Result<(BlendedModel, Distinguishers), DejonghError> {
    let ends: Vec<NodeId> = frame.iter_mask(frame.ends()).collect();
    let (universes, sentences, rank) = distinguishing_family(ends.len())?;
    let mut map = BTreeMap::new();
    for (i, &e) in ends.iter().enumerate() {
        map.insert(e, universes[i].clone());
    }
    let model = BlendedModel::construct(frame.clone(), map, rank, budget)?;
    let dist = Distinguishers { ends, sentences };
    Ok((model, dist))
}

/// Search the logic's frame class up to `size_bound` nodes for a frame and
/// valuation refuting `phi`; on success, build the blended certificate.
pub fn dejongh_countermodel(
    logic: Logic,
    phi: &PropFormula,
    size_bound: usize,
    sweep_budget: u64,
    element_budget: u64,
) -> Result<PipelineOutcome, DejonghError> {
    let frames = crate::frames::enumerate_class(logic.frame_class(), size_bound);
    let count = frames.len();
    for frame in frames {
        let (valuation, node) = match valid_in_frame(&frame, phi, sweep_budget)? {
            Validity::Valid => continue,
            Validity::Countermodel { valuation, node } => (valuation, node),
        };
        let (model, dist) = blend_over(&frame, element_budget)?;
        let counting = counting_check(&model)?;
        if !counting.ok() {
            return Err(DejonghError::Counting(format!("{counting:?}")));
        }
        let sigma = faithful_substitution(&model, &valuation, &dist)?;
        // the induction trace: every subformula's truth sets agree
        let mut subs = Vec::new();
        subformulas(phi, &mut subs);
        subs.sort();
        subs.dedup();
        for sub in &subs {
            let sentence = sigma.apply(sub)?;
            for v in frame.nodes() {
                let prop = force_prop(&frame, &valuation, v, sub)?;
                let blend = model.force_sentence(v, &sentence)?;
                if prop != blend {
                    return Err(DejonghError::Correspondence(format!(
                        "subformula {sub} disagrees at node {}",
                        frame.label(v)
                    )));
                }
            }
        }
        let correspondence = correspondence_check(&frame, &valuation, &model, &sigma, 2)?;
        let phi_sigma = sigma.apply(phi)?;
        if model.force_sentence(node, &phi_sigma)? {
            return Err(DejonghError::Correspondence(format!(
                "certificate sentence forced at the failing node {}",
                frame.label(node)
            )));
        }
        let universes: BTreeMap<u64, Universe> = dist
            .ends
            .iter()
            .map(|&e| (frame.label(e), model.universe(e).expect("end universe").clone()))
            .collect();
        let sigma_map: BTreeMap<String, SetFormula> =
            sigma.iter().map(|(p, f)| (p.clone(), f.clone())).collect();
        let rank = model.rank();
        return Ok(PipelineOutcome::Certificate(Box::new(Certificate {
            logic,
            formula: phi.clone(),
            frame,
            valuation,
            failing_node: node,
            universes,
            rank,
            sigma: sigma_map,
            phi_sigma,
            correspondence,
            subformulas_checked: subs.len(),
        })));
    }
    Ok(PipelineOutcome::NotRefutedUpToBound { frames_checked: count })
}

/// Report of the excluded-middle demonstration on the fork.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmDemoReport {
    pub phi: String,
    pub left_height: usize,
    pub right_height: usize,
    pub rank: usize,
    pub left_forces_phi: bool,
    pub right_forces_negation: bool,
    pub root_forces_phi: bool,
    pub root_forces_negation: bool,
    pub root_forces_excluded_middle: bool,
    pub phi_persists_above_left: bool,
}

impl EmDemoReport {
    pub fn expected_pattern(&self) -> bool {
        self.left_forces_phi
            && self.right_forces_negation
            && !self.root_forces_phi
            && !self.root_forces_negation
            && !self.root_forces_excluded_middle
            && self.phi_persists_above_left
    }
}

/// The finite failure of excluded middle: the fork with `V_3` and `V_4`
/// end universes and the sentence "ordinal 2 exists and ordinal 3 does
/// not". The left end forces it, the right forces its negation, the root
/// forces neither disjunct.
///
/// The model is evaluated lazily at rank 4: the verdicts only ever need the
/// root domain through stratum 3, and the end-node strata are universe
/// levels, so nothing approaches the budget even though eager construction
/// at rank 4 would.
pub fn excluded_middle_demo(element_budget: u64) -> Result<EmDemoReport, DejonghError> {
    let frame = crate::frames::fork();
    let mut universes = BTreeMap::new();
    universes.insert(1usize, Universe::build_vk(3, 10_000).expect("V_3 fits"));
    universes.insert(2usize, Universe::build_vk(4, 10_000).expect("V_4 fits"));
    let model = BlendedModel::new(frame, universes, 4, element_budget)?;
    let phi = ordinal_sentence(2);
    let neg = SetFormula::neg(phi.clone());
    let em = SetFormula::or(phi.clone(), neg.clone());
    let report = EmDemoReport {
        phi: phi.to_string(),
        left_height: 3,
        right_height: 4,
        rank: 4,
        left_forces_phi: model.force_sentence(1, &phi)?,
        right_forces_negation: model.force_sentence(2, &neg)?,
        root_forces_phi: model.force_sentence(0, &phi)?,
        root_forces_negation: model.force_sentence(0, &neg)?,
        root_forces_excluded_middle: model.force_sentence(0, &em)?,
        phi_persists_above_left: model.force_sentence(1, &phi)?,
    };
    Ok(report)
}
