//! Truncated IZF axiom checks.
//!
//! Each check rebuilds the explicit witness the axiom's proof names —
//! `c(w) = {f_vw(a), f_vw(b)}` for pairing, `b(w) = U_{c in a(w)} c(w)` for
//! union, the forced-subset collection for power set, the filtered value for
//! separation, the minimal-stratum collection set — verifies the witness
//! lands inside the truncated domain, and then verifies the axiom's
//! biconditional or implication with the forcing relation. Parameters range
//! over `D_v^{rank - margin}`; a witness that would need a stratum above the
//! cutoff is reported as `MarginTooSmall`, not as a failure.

use std::collections::BTreeSet;

use crate::formulas::SetFormula;
use crate::frames::NodeId;

use super::element::ElemId;
use super::model::{BlendError, BlendedModel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IzfAxiom {
    Extensionality,
    EmptySet,
    Pairing,
    Union,
    PowerSet,
    /// `phi` has the single free variable `x`.
    Separation(SetFormula),
    /// `phi` has free variables `x` and `y`.
    Collection(SetFormula),
    /// `phi` has the single free variable `x`.
    SetInduction(SetFormula),
}

impl IzfAxiom {
    pub fn name(&self) -> &'static str {
        match self {
            IzfAxiom::Extensionality => "extensionality",
            IzfAxiom::EmptySet => "empty-set",
            IzfAxiom::Pairing => "pairing",
            IzfAxiom::Union => "union",
            IzfAxiom::PowerSet => "power-set",
            IzfAxiom::Separation(_) => "separation",
            IzfAxiom::Collection(_) => "collection",
            IzfAxiom::SetInduction(_) => "set-induction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IzfVerdict {
    Verified { nodes: usize, instances: usize },
    MarginTooSmall { detail: String },
    Failed { detail: String },
}

impl IzfVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, IzfVerdict::Verified { .. })
    }
}

/// Rename the free variable `from` to `to`; binders never capture because
/// callers pick `to` fresh for the formula.
fn rename_free(phi: &SetFormula, from: &str, to: &str) -> SetFormula {
    let sub = |v: &String| -> String {
        if v == from {
            to.to_string()
        } else {
            v.clone()
        }
    };
    match phi {
        SetFormula::Bottom => SetFormula::Bottom,
        SetFormula::In(x, y) => SetFormula::In(sub(x), sub(y)),
        SetFormula::Eq(x, y) => SetFormula::Eq(sub(x), sub(y)),
        SetFormula::And(a, b) => SetFormula::and(rename_free(a, from, to), rename_free(b, from, to)),
        SetFormula::Or(a, b) => SetFormula::or(rename_free(a, from, to), rename_free(b, from, to)),
        SetFormula::Implies(a, b) => {
            SetFormula::implies(rename_free(a, from, to), rename_free(b, from, to))
        }
        SetFormula::Forall(x, body) if x != from => {
            SetFormula::forall(x.clone(), rename_free(body, from, to))
        }
        SetFormula::Exists(x, body) if x != from => {
            SetFormula::exists(x.clone(), rename_free(body, from, to))
        }
        other => other.clone(),
    }
}

fn biconditional(x: &str, lhs: SetFormula, rhs: SetFormula) -> SetFormula {
    SetFormula::forall(
        x,
        SetFormula::and(
            SetFormula::implies(lhs.clone(), rhs.clone()),
            SetFormula::implies(rhs, lhs),
        ),
    )
}

struct Checker<'a> {
    model: &'a BlendedModel,
    margin: usize,
    instances: usize,
}

impl<'a> Checker<'a> {
    fn params(&self, v: NodeId) -> Result<Vec<ElemId>, BlendError> {
        let rank = self.model.rank();
        let level = rank.saturating_sub(self.margin);
        if level == 0 {
            return Ok(Vec::new());
        }
        self.model.cumulative(v, level)
    }

    fn domain_set(&self, v: NodeId) -> Result<BTreeSet<ElemId>, BlendError> {
        Ok(self.model.domain(v)?.into_iter().collect())
    }

    /// Intern a candidate witness from per-cone-node member lists and check
    /// that it lies inside the truncated domain at `v`.
    fn witness(
        &self,
        v: NodeId,
        values: Vec<(NodeId, Vec<ElemId>)>,
    ) -> Result<Result<ElemId, String>, BlendError> {
        let model = self.model;
        let id = model.intern_values(v, values);
        if model.elem_stratum(id) > model.rank() {
            return Ok(Err(format!(
                "witness needs stratum {} over rank {}",
                model.elem_stratum(id),
                model.rank()
            )));
        }
        // end-node side: the witness must project into each end universe
        for e in model.frame().iter_mask(model.frame().ends_above(v)) {
            let r = model.restrict(id, e)?;
            let code = model.project(r)?;
            if !model.universe(e).expect("end universe").contains(code) {
                return Ok(Err(format!(
                    "witness projects to code {code} outside the universe at node {}",
                    model.frame().label(e)
                )));
            }
        }
        if !self.domain_set(v)?.contains(&id) {
            return Ok(Err("witness not in the materialized domain".to_string()));
        }
        Ok(Ok(id))
    }
}

/// Check one IZF axiom on a constructed model.
pub fn izf_check(
    model: &BlendedModel,
    axiom: &IzfAxiom,
    margin: usize,
) -> Result<IzfVerdict, BlendError> {
    let mut checker = Checker { model, margin, instances: 0 };
    let nodes = model.frame().len();
    for v in model.frame().nodes() {
        let verdict = match axiom {
            IzfAxiom::Extensionality => check_extensionality(&mut checker, v)?,
            IzfAxiom::EmptySet => check_empty(&mut checker, v)?,
            IzfAxiom::Pairing => check_pairing(&mut checker, v)?,
            IzfAxiom::Union => check_union(&mut checker, v)?,
            IzfAxiom::PowerSet => check_power(&mut checker, v)?,
            IzfAxiom::Separation(phi) => check_separation(&mut checker, v, phi)?,
            IzfAxiom::Collection(phi) => check_collection(&mut checker, v, phi)?,
            IzfAxiom::SetInduction(phi) => check_set_induction(&mut checker, v, phi)?,
        };
        match verdict {
            None => {}
            Some(bad) => return Ok(bad),
        }
    }
    Ok(IzfVerdict::Verified { nodes, instances: checker.instances })
}

fn check_extensionality(c: &mut Checker, v: NodeId) -> Result<Option<IzfVerdict>, BlendError> {
    let model = c.model;
    let body = SetFormula::implies(
        SetFormula::forall(
            "x",
            SetFormula::and(
                SetFormula::implies(SetFormula::member("x", "a"), SetFormula::member("x", "b")),
                SetFormula::implies(SetFormula::member("x", "b"), SetFormula::member("x", "a")),
            ),
        ),
        SetFormula::eq("a", "b"),
    );
    for a in c.params(v)? {
        for b in c.params(v)? {
            c.instances += 1;
            if !model.force(v, &body, &[("a".into(), a), ("b".into(), b)])? {
                return Ok(Some(IzfVerdict::Failed {
                    detail: format!(
                        "extensionality fails at node {} for {} / {}",
                        model.frame().label(v),
                        model.render_elem(a),
                        model.render_elem(b)
                    ),
                }));
            }
        }
    }
    Ok(None)
}

fn check_empty(c: &mut Checker, v: NodeId) -> Result<Option<IzfVerdict>, BlendError> {
    let model = c.model;
    c.instances += 1;
    let zero = model.zero(v);
    if !c.domain_set(v)?.contains(&zero) {
        return Ok(Some(IzfVerdict::Failed {
            detail: format!("empty element missing from domain at node {}", model.frame().label(v)),
        }));
    }
    let witness_ok = model.force(
        v,
        &SetFormula::forall_in("x", "a", SetFormula::Bottom),
        &[("a".into(), zero)],
    )?;
    let sentence = SetFormula::exists("a", SetFormula::forall_in("x", "a", SetFormula::Bottom));
    if !witness_ok || !model.force_sentence(v, &sentence)? {
        return Ok(Some(IzfVerdict::Failed {
            detail: format!("empty set not forced at node {}", model.frame().label(v)),
        }));
    }
    Ok(None)
}

fn check_pairing(c: &mut Checker, v: NodeId) -> Result<Option<IzfVerdict>, BlendError> {
    let model = c.model;
    let cone: Vec<NodeId> = model.frame().mask_to_vec(model.frame().cone(v));
    let bicond = biconditional(
        "x",
        SetFormula::member("x", "c"),
        SetFormula::or(SetFormula::eq("x", "a"), SetFormula::eq("x", "b")),
    );
    for a in c.params(v)? {
        for b in c.params(v)? {
            c.instances += 1;
            let mut values = Vec::new();
            for &w in &cone {
                let mut ms = vec![model.restrict(a, w)?, model.restrict(b, w)?];
                ms.sort_unstable();
                ms.dedup();
                values.push((w, ms));
            }
            let id = match c.witness(v, values)? {
                Ok(id) => id,
                Err(detail) => return Ok(Some(IzfVerdict::MarginTooSmall { detail })),
            };
            let env = [("a".into(), a), ("b".into(), b), ("c".into(), id)];
            if !model.force(v, &bicond, &env)? {
                return Ok(Some(IzfVerdict::Failed {
                    detail: format!(
                        "pairing witness not forced at node {} for {} / {}",
                        model.frame().label(v),
                        model.render_elem(a),
                        model.render_elem(b)
                    ),
                }));
            }
        }
    }
    Ok(None)
}

fn check_union(c: &mut Checker, v: NodeId) -> Result<Option<IzfVerdict>, BlendError> {
    let model = c.model;
    let cone: Vec<NodeId> = model.frame().mask_to_vec(model.frame().cone(v));
    let bicond = biconditional(
        "x",
        SetFormula::member("x", "b"),
        SetFormula::exists(
            "u",
            SetFormula::and(SetFormula::member("u", "a"), SetFormula::member("x", "u")),
        ),
    );
    for a in c.params(v)? {
        c.instances += 1;
        let mut values = Vec::new();
        for &w in &cone {
            let mut ms: Vec<ElemId> = Vec::new();
            for m in model.elem_value(a, w) {
                ms.extend(model.elem_value(m, w));
            }
            ms.sort_unstable();
            ms.dedup();
            values.push((w, ms));
        }
        let id = match c.witness(v, values)? {
            Ok(id) => id,
            Err(detail) => return Ok(Some(IzfVerdict::MarginTooSmall { detail })),
        };
        let env = [("a".into(), a), ("b".into(), id)];
        if !model.force(v, &bicond, &env)? {
            return Ok(Some(IzfVerdict::Failed {
                detail: format!(
                    "union witness not forced at node {} for {}",
                    model.frame().label(v),
                    model.render_elem(a)
                ),
            }));
        }
    }
    Ok(None)
}

fn subset_formula(x: &str, a: &str) -> SetFormula {
    SetFormula::forall_in("u", x, SetFormula::member("u", a))
}

fn check_power(c: &mut Checker, v: NodeId) -> Result<Option<IzfVerdict>, BlendError> {
    let model = c.model;
    let cone: Vec<NodeId> = model.frame().mask_to_vec(model.frame().cone(v));
    let bicond = biconditional("x", SetFormula::member("x", "b"), subset_formula("x", "a"));
    let subset = subset_formula("x", "a");
    for a in c.params(v)? {
        c.instances += 1;
        let mut values = Vec::new();
        for &w in &cone {
            let aw = model.restrict(a, w)?;
            let mut ms = Vec::new();
            for cand in model.domain(w)? {
                let env = [("x".into(), cand), ("a".into(), aw)];
                if model.force(w, &subset, &env)? {
                    ms.push(cand);
                }
            }
            ms.sort_unstable();
            ms.dedup();
            values.push((w, ms));
        }
        let id = match c.witness(v, values)? {
            Ok(id) => id,
            Err(detail) => return Ok(Some(IzfVerdict::MarginTooSmall { detail })),
        };
        let env = [("a".into(), a), ("b".into(), id)];
        if !model.force(v, &bicond, &env)? {
            return Ok(Some(IzfVerdict::Failed {
                detail: format!(
                    "power set witness not forced at node {} for {}",
                    model.frame().label(v),
                    model.render_elem(a)
                ),
            }));
        }
    }
    Ok(None)
}

fn check_separation(
    c: &mut Checker,
    v: NodeId,
    phi: &SetFormula,
) -> Result<Option<IzfVerdict>, BlendError> {
    let model = c.model;
    let cone: Vec<NodeId> = model.frame().mask_to_vec(model.frame().cone(v));
    let bicond = biconditional(
        "x",
        SetFormula::member("x", "cc"),
        SetFormula::and(SetFormula::member("x", "a"), phi.clone()),
    );
    for a in c.params(v)? {
        c.instances += 1;
        let mut values = Vec::new();
        for &w in &cone {
            let mut ms = Vec::new();
            for d in model.elem_value(a, w) {
                if model.force(w, phi, &[("x".into(), d)])? {
                    ms.push(d);
                }
            }
            ms.sort_unstable();
            values.push((w, ms));
        }
        let id = match c.witness(v, values)? {
            Ok(id) => id,
            Err(detail) => return Ok(Some(IzfVerdict::MarginTooSmall { detail })),
        };
        let env = [("a".into(), a), ("cc".into(), id)];
        if !model.force(v, &bicond, &env)? {
            return Ok(Some(IzfVerdict::Failed {
                detail: format!(
                    "separation witness not forced at node {} for {}",
                    model.frame().label(v),
                    model.render_elem(a)
                ),
            }));
        }
    }
    Ok(None)
}

fn check_collection(
    c: &mut Checker,
    v: NodeId,
    phi: &SetFormula,
) -> Result<Option<IzfVerdict>, BlendError> {
    let model = c.model;
    let cone: Vec<NodeId> = model.frame().mask_to_vec(model.frame().cone(v));
    let hypothesis = SetFormula::forall_in("x", "a", SetFormula::exists("y", phi.clone()));
    for a in c.params(v)? {
        c.instances += 1;
        if !model.force(v, &hypothesis, &[("a".into(), a)])? {
            // the hypothesis fails here; nodes above v re-check their own
            // restricted parameters
            continue;
        }
        // minimal stratum from which witnesses can be collected
        let mut minimal: Option<usize> = None;
        'alphas: for alpha in 0..=model.rank() {
            for &w in &cone {
                for x in model.elem_value(a, w) {
                    let mut found = false;
                    if alpha > 0 {
                        for y in model.cumulative(w, alpha)? {
                            let env = [("x".into(), x), ("y".into(), y)];
                            if model.force(w, phi, &env)? {
                                found = true;
                                break;
                            }
                        }
                    }
                    if !found {
                        continue 'alphas;
                    }
                }
            }
            minimal = Some(alpha);
            break;
        }
        let alpha = match minimal {
            Some(a) => a,
            None => {
                return Ok(Some(IzfVerdict::MarginTooSmall {
                    detail: format!(
                        "no stratum <= {} collects witnesses at node {}",
                        model.rank(),
                        model.frame().label(v)
                    ),
                }))
            }
        };
        let mut values = Vec::new();
        for &w in &cone {
            let mut ms = model.cumulative(w, alpha)?;
            ms.sort_unstable();
            values.push((w, ms));
        }
        let id = match c.witness(v, values)? {
            Ok(id) => id,
            Err(detail) => return Ok(Some(IzfVerdict::MarginTooSmall { detail })),
        };
        let conclusion =
            SetFormula::forall_in("x", "a", SetFormula::exists_in("y", "b", phi.clone()));
        let env = [("a".into(), a), ("b".into(), id)];
        if !model.force(v, &conclusion, &env)? {
            return Ok(Some(IzfVerdict::Failed {
                detail: format!(
                    "collection witness (stratum {alpha}) not forced at node {} for {}",
                    model.frame().label(v),
                    model.render_elem(a)
                ),
            }));
        }
    }
    Ok(None)
}

fn check_set_induction(
    c: &mut Checker,
    v: NodeId,
    phi: &SetFormula,
) -> Result<Option<IzfVerdict>, BlendError> {
    let model = c.model;
    c.instances += 1;
    let phi_a = rename_free(phi, "x", "ind_a");
    let hypothesis = SetFormula::forall(
        "ind_a",
        SetFormula::implies(SetFormula::forall_in("x", "ind_a", phi.clone()), phi_a.clone()),
    );
    if !model.force_sentence(v, &hypothesis)? {
        return Ok(None);
    }
    let conclusion = SetFormula::forall("ind_a", phi_a);
    if !model.force_sentence(v, &conclusion)? {
        return Ok(Some(IzfVerdict::Failed {
            detail: format!(
                "set induction conclusion not forced at node {}",
                model.frame().label(v)
            ),
        }));
    }
    Ok(None)
}
