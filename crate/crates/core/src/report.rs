//! JSON views of verdicts, model reports and certificates. Field order is
//! fixed by struct order and map keys are sorted, so a fixed seed and
//! configuration produce byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::blended::{BlendError, BlendedModel, IzfVerdict};
use crate::dejongh::Certificate;
use crate::frames::{Frame, FrameJson};
use crate::propositional::{MemberVerdict, Validity};

#[derive(Serialize)]
pub struct CountermodelJson {
    pub valuation: BTreeMap<String, Vec<u64>>,
    pub node: u64,
}

#[derive(Serialize)]
pub struct ValidityJson {
    pub formula: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<CountermodelJson>,
}

pub fn validity_json(frame: &Frame, formula: &str, v: &Validity) -> ValidityJson {
    match v {
        Validity::Valid => ValidityJson {
            formula: formula.to_string(),
            verdict: "valid".into(),
            countermodel: None,
        },
        Validity::Countermodel { valuation, node } => ValidityJson {
            formula: formula.to_string(),
            verdict: "countermodel".into(),
            countermodel: Some(CountermodelJson {
                valuation: valuation.to_labels(frame),
                node: frame.label(*node),
            }),
        },
    }
}

#[derive(Serialize)]
pub struct MemberJson {
    pub formula: String,
    pub class: String,
    pub bound: usize,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames_checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<CountermodelJson>,
}

pub fn member_json(formula: &str, class: &str, bound: usize, v: &MemberVerdict) -> MemberJson {
    match v {
        MemberVerdict::ValidUpToBound { frames_checked } => MemberJson {
            formula: formula.to_string(),
            class: class.to_string(),
            bound,
            verdict: "valid-up-to-bound".into(),
            frames_checked: Some(*frames_checked),
            frame: None,
            countermodel: None,
        },
        MemberVerdict::Countermodel { frame, valuation, node } => MemberJson {
            formula: formula.to_string(),
            class: class.to_string(),
            bound,
            verdict: "countermodel".into(),
            frames_checked: None,
            frame: Some(frame.to_json()),
            countermodel: Some(CountermodelJson {
                valuation: valuation.to_labels(frame),
                node: frame.label(*node),
            }),
        },
    }
}

#[derive(Serialize)]
pub struct TransitionCheckJson {
    pub chains_checked: usize,
    pub compositions_ok: bool,
}

#[derive(Serialize)]
pub struct ModelReportJson {
    pub frame: FrameJson,
    pub rank: usize,
    pub end_universe_heights: BTreeMap<u64, usize>,
    /// Node label -> cumulative domain sizes for ranks 1..=rank.
    pub domain_sizes: BTreeMap<u64, Vec<usize>>,
    pub element_count: usize,
    pub transition_checks: TransitionCheckJson,
}

/// Materialize the model and summarize it: domain growth per node, universe
/// heights, and a spot check that transition maps compose along every chain.
pub fn model_report(model: &BlendedModel) -> Result<ModelReportJson, BlendError> {
    let frame = model.frame().clone();
    let mut domain_sizes = BTreeMap::new();
    let mut element_count = 0usize;
    for v in frame.nodes() {
        let profile = model.domain_profile(v)?;
        element_count += profile.last().copied().unwrap_or(0);
        domain_sizes.insert(frame.label(v), profile);
    }
    let mut heights = BTreeMap::new();
    for e in frame.iter_mask(frame.ends()) {
        heights.insert(frame.label(e), model.universe(e).expect("end universe").height());
    }
    // composition spot checks along all chains v <= w <= u
    let mut chains = 0usize;
    let mut ok = true;
    for v in frame.nodes() {
        for w in frame.iter_mask(frame.cone(v)) {
            for u in frame.iter_mask(frame.cone(w)) {
                if v == w || w == u {
                    continue;
                }
                chains += 1;
                for id in model.domain(v)?.into_iter().take(8) {
                    let via = model.restrict(model.restrict(id, w)?, u)?;
                    if via != model.restrict(id, u)? {
                        ok = false;
                    }
                }
            }
        }
    }
    Ok(ModelReportJson {
        frame: frame.to_json(),
        rank: model.rank(),
        end_universe_heights: heights,
        domain_sizes,
        element_count,
        transition_checks: TransitionCheckJson { chains_checked: chains, compositions_ok: ok },
    })
}

#[derive(Serialize)]
pub struct IzfJson {
    pub axiom: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    pub margin: usize,
    pub verdict: String,
    pub detail: String,
}

pub fn izf_json(axiom: &str, formula: Option<String>, margin: usize, v: &IzfVerdict) -> IzfJson {
    let (verdict, detail) = match v {
        IzfVerdict::Verified { nodes, instances } => (
            "verified".to_string(),
            format!("{instances} instances across {nodes} nodes"),
        ),
        IzfVerdict::MarginTooSmall { detail } => ("margin-too-small".to_string(), detail.clone()),
        IzfVerdict::Failed { detail } => ("failed".to_string(), detail.clone()),
    };
    IzfJson { axiom: axiom.to_string(), formula, margin, verdict, detail }
}

#[derive(Serialize)]
pub struct CertificateJson {
    pub logic: String,
    pub formula: String,
    pub frame: FrameJson,
    pub valuation: BTreeMap<String, Vec<u64>>,
    pub failing_node: u64,
    pub rank: usize,
    pub end_universe_heights: BTreeMap<u64, usize>,
    pub end_universes: BTreeMap<u64, Value>,
    pub sigma: BTreeMap<String, String>,
    pub phi_sigma: String,
    pub correspondence_depth: usize,
    pub correspondence_compositions: u64,
    pub correspondence_direct_forcings: u64,
    pub subformulas_checked: usize,
    pub replay: Vec<String>,
}

pub fn certificate_json(cert: &Certificate) -> CertificateJson {
    let frame = &cert.frame;
    let heights: BTreeMap<u64, usize> =
        cert.universes.iter().map(|(&l, u)| (l, u.height())).collect();
    let carriers: BTreeMap<u64, Value> =
        cert.universes.iter().map(|(&l, u)| (l, u.to_json())).collect();
    let sigma: BTreeMap<String, String> =
        cert.sigma.iter().map(|(p, f)| (p.clone(), f.to_string())).collect();
    let heights_arg: Vec<String> = frame
        .iter_mask(frame.ends())
        .map(|e| format!("{}", cert.universes[&frame.label(e)].height()))
        .collect();
    let replay = vec![
        "save the `frame` object to frame.json, the `valuation` object to valuation.json".into(),
        format!("kripke-blend valid --frame frame.json --formula '{}'", cert.formula),
        format!(
            "kripke-blend blend --frame frame.json --universes {} --rank {}",
            heights_arg.join(","),
            cert.rank
        ),
        format!(
            "kripke-blend faithful --frame frame.json --universes {} --rank {} --valuation valuation.json",
            heights_arg.join(","),
            cert.rank
        ),
        format!(
            "the sentence `phi_sigma` is then not forced at node {}",
            frame.label(cert.failing_node)
        ),
    ];
    CertificateJson {
        logic: cert.logic.name(),
        formula: cert.formula.to_string(),
        frame: frame.to_json(),
        valuation: cert.valuation.to_labels(frame),
        failing_node: frame.label(cert.failing_node),
        rank: cert.rank,
        end_universe_heights: heights,
        end_universes: carriers,
        sigma,
        phi_sigma: cert.phi_sigma.to_string(),
        correspondence_depth: cert.correspondence.depth,
        correspondence_compositions: cert.correspondence.formulas_checked,
        correspondence_direct_forcings: cert.correspondence.raw_force_checked,
        subformulas_checked: cert.subformulas_checked,
        replay,
    }
}
