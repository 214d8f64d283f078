//! Upset-counting sentences, node identifiers, faithful substitutions, and
//! the correspondence between propositional forcing and blended forcing.

mod pipeline;

pub use pipeline::{
    blend_over, dejongh_countermodel, excluded_middle_demo, Certificate, EmDemoReport, Logic,
    PipelineOutcome,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::blended::{BlendError, BlendedModel, ElemId};
use crate::formulas::{ordinal_sentence, PropFormula, SetFormula, Substitution};
use crate::frames::{Frame, NodeId, NodeMask};
use crate::propositional::{implication_mask, PropError, Valuation};
use crate::universes::Universe;

#[derive(Debug, Error)]
pub enum DejonghError {
    #[error(transparent)]
    Blend(#[from] BlendError),
    #[error(transparent)]
    Prop(#[from] PropError),
    #[error("distinguisher matrix violated: sentence {i} at end-node {j}: expected {expected}")]
    BadDistinguishers { i: usize, j: u64, expected: bool },
    #[error("counting check failed: {0}")]
    Counting(String),
    #[error("faithfulness failure for letter `{0}` (bug sentinel)")]
    Faithfulness(String),
    #[error("correspondence mismatch: {0}")]
    Correspondence(String),
    #[error("no distinguishing universe family for {0} end-nodes")]
    TooManyEnds(usize),
    #[error("substitution error: {0}")]
    Subst(#[from] crate::formulas::SubstError),
}

/// A sentence together with its truth set in a fixed blended model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthSet {
    pub sentence: SetFormula,
    pub mask: NodeMask,
}

impl TruthSet {
    pub fn compute(model: &BlendedModel, sentence: SetFormula) -> Result<TruthSet, BlendError> {
        let mask = model.truth_set(&sentence)?;
        Ok(TruthSet { sentence, mask })
    }
}

/// `x` is a subset of 1: every element of an element of `x` is absurd.
pub fn subset_of_one(x: &str) -> SetFormula {
    SetFormula::forall_in("y", x, SetFormula::forall_in("z", "y", SetFormula::Bottom))
}

/// The upset-counting sentence: given `n` subsets of 1, two of them
/// coincide. The consequent is the pairwise-equality disjunction (empty for
/// `n = 1`), which is what the pigeonhole argument needs; a node forces
/// `psi(n + 1)` exactly when `n >= U_v`.
pub fn psi(n: usize) -> SetFormula {
    assert!(n >= 1, "psi is defined for n >= 1");
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let antecedent = SetFormula::conj(names.iter().map(|x| subset_of_one(x)).collect());
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push(SetFormula::eq(names[i].clone(), names[j].clone()));
        }
    }
    let mut body = SetFormula::implies(antecedent, SetFormula::disj(pairs));
    for x in names.into_iter().rev() {
        body = SetFormula::forall(x, body);
    }
    body.canonicalize()
}

/// Distinguishing sentences for the end-nodes: `sentences[i]` must be forced
/// at `ends[j]` exactly when `i = j`.
#[derive(Debug, Clone)]
pub struct Distinguishers {
    pub ends: Vec<NodeId>,
    pub sentences: Vec<SetFormula>,
}

impl Distinguishers {
    /// Evaluate the matrix at every end-node.
    pub fn validate(&self, model: &BlendedModel) -> Result<(), DejonghError> {
        for (i, phi) in self.sentences.iter().enumerate() {
            for (j, &e) in self.ends.iter().enumerate() {
                let forced = model.force_sentence(e, phi)?;
                if forced != (i == j) {
                    return Err(DejonghError::BadDistinguishers {
                        i,
                        j: model.frame().label(e),
                        expected: i == j,
                    });
                }
            }
        }
        Ok(())
    }
}

/// `x` has rank at most 2: members of members of members are absurd.
fn rank_le_two(x: &str) -> SetFormula {
    SetFormula::forall_in(
        "y",
        x,
        SetFormula::forall_in("u", "y", SetFormula::forall_in("w", "u", SetFormula::Bottom)),
    )
}

/// "There are at least `c` pairwise distinct sets of rank at most 2."
fn at_least_rank2(c: usize) -> SetFormula {
    let names: Vec<String> = (0..c).map(|i| format!("x{i}")).collect();
    let mut parts: Vec<SetFormula> = names.iter().map(|x| rank_le_two(x)).collect();
    for i in 0..c {
        for j in (i + 1)..c {
            parts.push(SetFormula::neg(SetFormula::eq(names[i].clone(), names[j].clone())));
        }
    }
    let mut body = SetFormula::conj(parts);
    for x in names.into_iter().rev() {
        body = SetFormula::exists(x, body);
    }
    body
}

/// "There are exactly `c` sets of rank at most 2", the count-based
/// distinguisher for universes of equal height.
pub fn exact_rank2_count(c: usize) -> SetFormula {
    SetFormula::and(at_least_rank2(c), SetFormula::neg(at_least_rank2(c + 1))).canonicalize()
}

/// A family of universes and matching distinguishing sentences for `m`
/// end-nodes, small enough to construct at the returned rank cutoff.
///
/// One or two end-nodes get cumulative levels of distinct heights
/// (`V_2`, `V_3`) told apart by ordinal-height sentences. Three end-nodes
/// use transitive carriers of equal height but different rank-2 counts,
/// because a third distinct height would push the cutoff (and with it the
/// non-end domains) past any workable budget.
pub fn distinguishing_family(
    m: usize,
) -> Result<(Vec<Universe>, Vec<SetFormula>, usize), DejonghError> {
    match m {
        1 => Ok((
            vec![Universe::build_vk(2, 10_000).expect("V_2 fits")],
            vec![ordinal_sentence(1)],
            2,
        )),
        2 => Ok((
            vec![
                Universe::build_vk(2, 10_000).expect("V_2 fits"),
                Universe::build_vk(3, 10_000).expect("V_3 fits"),
            ],
            vec![ordinal_sentence(1), ordinal_sentence(2)],
            3,
        )),
        3 => Ok((
            vec![
                Universe::transitive_slice(2),
                Universe::transitive_slice(3),
                Universe::transitive_slice(4),
            ],
            vec![exact_rank2_count(2), exact_rank2_count(3), exact_rank2_count(4)],
            3,
        )),
        other => Err(DejonghError::TooManyEnds(other)),
    }
}

/// Derive distinguishing sentences for whatever universes a model carries:
/// ordinal-height sentences when the end universes have pairwise distinct
/// heights, count sentences when they have pairwise distinct numbers of
/// rank-at-most-2 sets. The matrix is validated before returning.
pub fn derive_distinguishers(model: &BlendedModel) -> Result<Distinguishers, DejonghError> {
    let frame = model.frame();
    let ends: Vec<NodeId> = frame.iter_mask(frame.ends()).collect();
    let heights: Vec<usize> =
        ends.iter().map(|e| model.universe(*e).expect("end universe").height()).collect();
    let mut sorted = heights.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let sentences: Vec<SetFormula> = if sorted.len() == ends.len() {
        heights.iter().map(|&k| ordinal_sentence(k.saturating_sub(1))).collect()
    } else {
        let counts: Vec<usize> = ends
            .iter()
            .map(|e| {
                model
                    .universe(*e)
                    .expect("end universe")
                    .carrier()
                    .iter()
                    .filter(|&&c| c < 4)
                    .count()
            })
            .collect();
        let mut csorted = counts.clone();
        csorted.sort_unstable();
        csorted.dedup();
        if csorted.len() != ends.len() {
            return Err(DejonghError::TooManyEnds(ends.len()));
        }
        counts.iter().map(|&c| exact_rank2_count(c)).collect()
    };
    let dist = Distinguishers { ends, sentences };
    dist.validate(model)?;
    Ok(dist)
}

#[derive(Debug, Clone)]
pub struct CountingNodeReport {
    pub node: u64,
    pub upset_count: usize,
    pub psi_boundary_ok: bool,
    pub classification_ok: bool,
}

#[derive(Debug, Clone)]
pub struct CountingReport {
    pub nodes: Vec<CountingNodeReport>,
}

impl CountingReport {
    pub fn ok(&self) -> bool {
        self.nodes.iter().all(|n| n.psi_boundary_ok && n.classification_ok)
    }
}

/// Verify the upset-counting behaviour of `psi` and the classification of
/// the forced subsets of 1: at every node `v`, `psi(n+1)` is forced exactly
/// when `n >= U_v` (checked through `n = U_v + 2`), and the elements forcing
/// "subset of 1" are precisely the characteristic elements of the upsets.
pub fn counting_check(model: &BlendedModel) -> Result<CountingReport, DejonghError> {
    let frame = model.frame().clone();
    let mut nodes = Vec::new();
    for v in frame.nodes() {
        let u_v = frame.upset_count(v);
        let mut psi_ok = true;
        for n in 0..=(u_v + 2) {
            let forced = model.force_sentence(v, &psi(n + 1))?;
            if forced != (n >= u_v) {
                psi_ok = false;
            }
        }
        // classification: { x in D_v : v |- subset_of_one(x) } = { 1^v_X }
        let small = subset_of_one("x");
        let mut forced_small: Vec<ElemId> = Vec::new();
        for id in model.domain(v)? {
            if model.force(v, &small, &[("x".into(), id)])? {
                forced_small.push(id);
            }
        }
        forced_small.sort_unstable();
        let mut ones: Vec<ElemId> = frame
            .upsets(v)
            .into_iter()
            .map(|x_mask| model.one_of_upset(v, x_mask))
            .collect::<Result<_, _>>()?;
        ones.sort_unstable();
        ones.dedup();
        let classification_ok = forced_small == ones && ones.len() == u_v;
        nodes.push(CountingNodeReport {
            node: frame.label(v),
            upset_count: u_v,
            psi_boundary_ok: psi_ok,
            classification_ok,
        });
    }
    Ok(CountingReport { nodes })
}

/// The node identifier `chi_v = psi(U_v + 1) /\ ~phi_i` for each
/// distinguisher of an end-node not above `v`; its truth set is exactly the
/// cone of `v` once the distinguisher matrix holds.
pub fn chi(
    model: &BlendedModel,
    v: NodeId,
    dist: &Distinguishers,
) -> Result<SetFormula, DejonghError> {
    let frame = model.frame();
    let mut parts = vec![psi(frame.upset_count(v) + 1)];
    for (i, &e) in dist.ends.iter().enumerate() {
        if !frame.le(v, e) {
            parts.push(SetFormula::neg(dist.sentences[i].clone()));
        }
    }
    Ok(SetFormula::conj(parts).canonicalize())
}

/// All `chi_v` with their truth sets, validating the distinguishers first.
pub fn chi_family(
    model: &BlendedModel,
    dist: &Distinguishers,
) -> Result<Vec<TruthSet>, DejonghError> {
    dist.validate(model)?;
    let frame = model.frame().clone();
    let mut out = Vec::new();
    for v in frame.nodes() {
        let sentence = chi(model, v, dist)?;
        let mask = model.truth_set(&sentence)?;
        out.push(TruthSet { sentence, mask });
    }
    Ok(out)
}

/// Build the substitution realizing a valuation: each letter maps to the
/// disjunction of `chi_v` over the minimal nodes of its upset (bottom for
/// the empty upset), and every image's truth set is re-verified against the
/// valuation.
pub fn faithful_substitution(
    model: &BlendedModel,
    valuation: &Valuation,
    dist: &Distinguishers,
) -> Result<Substitution, DejonghError> {
    let frame = model.frame().clone();
    let chis = chi_family(model, dist)?;
    let mut map = BTreeMap::new();
    for (letter, &mask) in valuation.iter() {
        let parts: Vec<SetFormula> = frame
            .minimal_elements(mask)
            .into_iter()
            .map(|v| chis[v].sentence.clone())
            .collect();
        let image = SetFormula::disj(parts);
        let got = model.truth_set(&image)?;
        if got != mask {
            return Err(DejonghError::Faithfulness(letter.clone()));
        }
        map.insert(letter.clone(), image);
    }
    Ok(Substitution::new(map)?)
}

#[derive(Debug, Clone)]
pub struct CorrespondenceReport {
    pub letters: Vec<String>,
    pub depth: usize,
    /// Compositions checked over the truth-set quotient.
    pub formulas_checked: u64,
    /// Whole substituted formulas evaluated directly by the blended engine.
    pub raw_force_checked: u64,
}

/// Check `force_prop(F, V, v, chi) <=> force_set(B, v, chi^sigma)` for every
/// propositional formula of connective depth `<= depth` over the valuation's
/// letters, at every node.
///
/// Both forcing relations combine subformula truth sets with the same three
/// mask operations, so the verdict of a compound formula is a function of
/// its children's (propositional, blended) truth-set pairs alone. The sweep
/// therefore deduplicates each level by that signature pair: checking one
/// representative per pair covers every formula in the level. The atoms'
/// blended masks come from the real evaluator, and a layer of direct
/// `force` calls on whole substituted formulas (exhaustive through depth 2,
/// sampled above) guards the composed masks against engine drift.
pub fn correspondence_check(
    frame: &Frame,
    valuation: &Valuation,
    model: &BlendedModel,
    sigma: &Substitution,
    depth: usize,
) -> Result<CorrespondenceReport, DejonghError> {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    let letters: Vec<String> = valuation.iter().map(|(p, _)| p.clone()).collect();
    // representatives of depth <= current level, one per signature pair
    let mut reps: Vec<(PropFormula, NodeMask, NodeMask)> = Vec::new();
    let mut seen: std::collections::BTreeSet<(NodeMask, NodeMask)> = Default::default();
    let mut raw_checked = 0u64;
    let push_rep = |reps: &mut Vec<(PropFormula, NodeMask, NodeMask)>,
                        seen: &mut std::collections::BTreeSet<(NodeMask, NodeMask)>,
                        phi: PropFormula,
                        pm: NodeMask,
                        bm: NodeMask| {
        if seen.insert((pm, bm)) {
            reps.push((phi, pm, bm));
        }
    };
    push_rep(&mut reps, &mut seen, PropFormula::Bottom, 0, 0);
    for p in &letters {
        let prop_mask = valuation.mask(p).expect("letter has a mask");
        let image = sigma
            .get(p)
            .ok_or_else(|| DejonghError::Faithfulness(p.clone()))?;
        let blend_mask = model.truth_set(image)?;
        if prop_mask != blend_mask {
            return Err(DejonghError::Correspondence(format!(
                "letter `{p}`: prop {prop_mask:b} vs blended {blend_mask:b}"
            )));
        }
        push_rep(&mut reps, &mut seen, PropFormula::Letter(p.clone()), prop_mask, blend_mask);
    }
    let mut checked = reps.len() as u64;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);

    let compose = |op: u8, a: (NodeMask, NodeMask), b: (NodeMask, NodeMask)| -> (NodeMask, NodeMask) {
        match op {
            0 => (a.0 & b.0, a.1 & b.1),
            1 => (a.0 | b.0, a.1 | b.1),
            _ => (
                implication_mask(frame, a.0, b.0),
                implication_mask(frame, a.1, b.1),
            ),
        }
    };

    for level in 1..=depth {
        let prev = reps.len();
        let mut fresh: Vec<(PropFormula, NodeMask, NodeMask)> = Vec::new();
        for i in 0..prev {
            for j in 0..prev {
                for op in 0u8..3 {
                    let (pm, bm) =
                        compose(op, (reps[i].1, reps[i].2), (reps[j].1, reps[j].2));
                    checked += 1;
                    if pm != bm {
                        let phi = build(op, &reps[i].0, &reps[j].0);
                        return Err(DejonghError::Correspondence(format!(
                            "{phi}: prop {pm:b} vs blended {bm:b}"
                        )));
                    }
                    // ground the composed mask in direct evaluations
                    if level <= 2 || rng.gen_ratio(1, 16) {
                        let phi = build(op, &reps[i].0, &reps[j].0);
                        let sentence = sigma.apply(&phi)?;
                        let direct = model.truth_set(&sentence)?;
                        if direct != bm {
                            return Err(DejonghError::Correspondence(format!(
                                "engine drift on {phi}: direct {direct:b} vs composed {bm:b}"
                            )));
                        }
                        raw_checked += 1;
                    }
                    if level < depth && !seen.contains(&(pm, bm)) {
                        let phi = build(op, &reps[i].0, &reps[j].0);
                        fresh.push((phi, pm, bm));
                        seen.insert((pm, bm));
                    }
                }
            }
        }
        reps.extend(fresh);
    }
    Ok(CorrespondenceReport {
        letters,
        depth,
        formulas_checked: checked,
        raw_force_checked: raw_checked,
    })
}

fn build(op: u8, a: &PropFormula, b: &PropFormula) -> PropFormula {
    match op {
        0 => PropFormula::and(a.clone(), b.clone()),
        1 => PropFormula::or(a.clone(), b.clone()),
        _ => PropFormula::implies(a.clone(), b.clone()),
    }
}
