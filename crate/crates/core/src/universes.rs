//! Finite transitive extensional membership structures.
//!
//! Carrier elements are hereditarily finite sets in Ackermann coding:
//! `code({a, b, ...}) = 2^code(a) + 2^code(b) + ...`. The coding is canonical
//! (sorted, duplicate-free, recursively so), which makes extensional equality
//! literal integer equality and membership a bit test. Cumulative levels fit
//! comfortably: every element of `V_5` is a subset of the 16-element `V_4`,
//! so codes stay below `2^16`.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::formulas::SetFormula;

pub type SetCode = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("V_{k} has {size} elements, over the budget of {budget}")]
    Budget { k: usize, size: u64, budget: u64 },
    #[error("V_{0} is not supported: element codes would overflow 64 bits")]
    TooTall(usize),
    #[error("not transitive: element {element} has member {member} outside the carrier")]
    NotTransitive { element: SetCode, member: SetCode },
    #[error("variable `{0}` is not bound in the environment")]
    UnboundVariable(String),
    #[error("invalid universe JSON: {0}")]
    BadJson(String),
}

/// A finite transitive extensional membership structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    /// Sorted, duplicate-free Ackermann codes.
    carrier: Vec<SetCode>,
    /// `max rank + 1`; the least `k` with `carrier` a subset of `V_k`.
    height: usize,
}

/// Members of a code are its set bit positions.
pub fn members(code: SetCode) -> impl Iterator<Item = SetCode> {
    let mut rest = code;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let b = rest.trailing_zeros() as SetCode;
            rest &= rest - 1;
            Some(b)
        }
    })
}

/// Von Neumann rank of a hereditarily finite set given by its code.
pub fn rank(code: SetCode) -> usize {
    if code == 0 {
        0
    } else {
        members(code).map(|m| rank(m) + 1).max().unwrap()
    }
}

/// The code of the von Neumann ordinal `n`: `n+1 = n ∪ {n}`.
pub fn ordinal_code(n: usize) -> SetCode {
    let mut code = 0u64;
    for _ in 0..n {
        assert!(code < 64, "ordinal {n} is not representable in 64-bit codes");
        code |= 1 << code;
    }
    code
}

impl Universe {
    /// The cumulative level `V_k`. `|V_5| = 2^16` exceeds the default element
    /// budget, so building it requires an explicit budget.
    pub fn build_vk(k: usize, budget: u64) -> Result<Universe, UniverseError> {
        if k > 5 {
            return Err(UniverseError::TooTall(k));
        }
        // |V_k| = tower(k - 1) for k >= 1
        let size: u64 = match k {
            0 => 0,
            1 => 1,
            2 => 2,
            3 => 4,
            4 => 16,
            _ => 65536,
        };
        if size > budget {
            return Err(UniverseError::Budget { k, size, budget });
        }
        let carrier: Vec<SetCode> = (0..size).collect();
        Ok(Universe { carrier, height: k })
    }

    /// An arbitrary carrier, validated for transitivity. Extensionality and
    /// well-foundedness are automatic for Ackermann codes.
    pub fn validate(mut carrier: Vec<SetCode>) -> Result<Universe, UniverseError> {
        carrier.sort_unstable();
        carrier.dedup();
        for &x in &carrier {
            for m in members(x) {
                if carrier.binary_search(&m).is_err() {
                    return Err(UniverseError::NotTransitive { element: x, member: m });
                }
            }
        }
        let height = carrier.iter().map(|&x| rank(x) + 1).max().unwrap_or(0);
        Ok(Universe { carrier, height })
    }

    /// The transitive set whose elements are the first `c` codes; for
    /// `c <= 4` these are exactly the sets of rank at most 2, so carriers
    /// with different `c` are told apart by counting them.
    pub fn transitive_slice(c: usize) -> Universe {
        assert!(c >= 1 && c <= 4, "transitive slices are defined for 1..=4");
        Universe::validate((0..c as u64).collect()).expect("prefix of codes is transitive")
    }

    pub fn carrier(&self) -> &[SetCode] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn contains(&self, code: SetCode) -> bool {
        self.carrier.binary_search(&code).is_ok()
    }

    /// Elements of rank `< alpha` — the carrier of `(V_alpha)` relativized to
    /// this universe.
    pub fn level(&self, alpha: usize) -> Vec<SetCode> {
        self.carrier.iter().copied().filter(|&x| rank(x) < alpha).collect()
    }

    /// Tarskian satisfaction; quantifiers range over the carrier.
    ///
    /// Bounded quantifier shapes `forall x . (x in t -> ...)` and
    /// `exists x . (x in t & ...)` enumerate the members of `t` instead of
    /// the whole carrier, which is what makes cardinality formulas over
    /// `V_5` tractable.
    pub fn eval(
        &self,
        phi: &SetFormula,
        env: &mut Vec<(String, SetCode)>,
    ) -> Result<bool, UniverseError> {
        let lookup = |v: &str, env: &Vec<(String, SetCode)>| -> Result<SetCode, UniverseError> {
            env.iter()
                .rev()
                .find(|(name, _)| name == v)
                .map(|(_, c)| *c)
                .ok_or_else(|| UniverseError::UnboundVariable(v.to_string()))
        };
        match phi {
            SetFormula::Bottom => Ok(false),
            SetFormula::In(x, y) => {
                let cx = lookup(x, env)?;
                let cy = lookup(y, env)?;
                Ok(cx < 64 && cy & (1 << cx) != 0)
            }
            SetFormula::Eq(x, y) => Ok(lookup(x, env)? == lookup(y, env)?),
            SetFormula::And(a, b) => Ok(self.eval(a, env)? && self.eval(b, env)?),
            SetFormula::Or(a, b) => Ok(self.eval(a, env)? || self.eval(b, env)?),
            SetFormula::Implies(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            SetFormula::Forall(x, body) => {
                if let SetFormula::Implies(guard, rest) = &**body {
                    if let SetFormula::In(gx, gt) = &**guard {
                        if gx == x && gt != x {
                            let bound = lookup(gt, env)?;
                            for m in members(bound) {
                                env.push((x.clone(), m));
                                let ok = self.eval(rest, env)?;
                                env.pop();
                                if !ok {
                                    return Ok(false);
                                }
                            }
                            return Ok(true);
                        }
                    }
                }
                for &c in &self.carrier {
                    env.push((x.clone(), c));
                    let ok = self.eval(body, env)?;
                    env.pop();
                    if !ok {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            SetFormula::Exists(x, body) => {
                if let SetFormula::And(guard, rest) = &**body {
                    if let SetFormula::In(gx, gt) = &**guard {
                        if gx == x && gt != x {
                            let bound = lookup(gt, env)?;
                            for m in members(bound) {
                                env.push((x.clone(), m));
                                let ok = self.eval(rest, env)?;
                                env.pop();
                                if ok {
                                    return Ok(true);
                                }
                            }
                            return Ok(false);
                        }
                    }
                }
                for &c in &self.carrier {
                    env.push((x.clone(), c));
                    let ok = self.eval(body, env)?;
                    env.pop();
                    if ok {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Evaluate a sentence.
    pub fn eval_sentence(&self, phi: &SetFormula) -> Result<bool, UniverseError> {
        self.eval(phi, &mut Vec::new())
    }

    /// Nested-array JSON: the empty set is `[]`.
    pub fn to_json(&self) -> Value {
        Value::Array(self.carrier.iter().map(|&c| code_to_json(c)).collect())
    }

    pub fn from_json(v: &Value) -> Result<Universe, UniverseError> {
        let arr = v
            .as_array()
            .ok_or_else(|| UniverseError::BadJson("expected an array of sets".into()))?;
        let codes = arr.iter().map(code_from_json).collect::<Result<Vec<_>, _>>()?;
        Universe::validate(codes)
    }
}

fn code_to_json(code: SetCode) -> Value {
    Value::Array(members(code).map(code_to_json).collect())
}

fn code_from_json(v: &Value) -> Result<SetCode, UniverseError> {
    let arr = v
        .as_array()
        .ok_or_else(|| UniverseError::BadJson("set elements must be arrays".into()))?;
    let mut code = 0u64;
    for elem in arr {
        let m = code_from_json(elem)?;
        if m >= 64 {
            return Err(UniverseError::BadJson("element too deep to encode".into()));
        }
        code |= 1 << m;
    }
    Ok(code)
}

/// Classical satisfaction with an environment given as a map.
pub fn eval_classical(
    universe: &Universe,
    phi: &SetFormula,
    env: &[(String, SetCode)],
) -> Result<bool, UniverseError> {
    let mut stack: Vec<(String, SetCode)> = env.to_vec();
    universe.eval(phi, &mut stack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{ordinal_sentence, parse_set};

    #[test]
    fn vk_sizes() {
        assert_eq!(Universe::build_vk(0, 10_000).unwrap().len(), 0);
        assert_eq!(Universe::build_vk(1, 10_000).unwrap().len(), 1);
        assert_eq!(Universe::build_vk(2, 10_000).unwrap().len(), 2);
        assert_eq!(Universe::build_vk(3, 10_000).unwrap().len(), 4);
        assert_eq!(Universe::build_vk(4, 10_000).unwrap().len(), 16);
    }

    #[test]
    fn v5_exceeds_default_budget() {
        assert!(matches!(
            Universe::build_vk(5, 10_000),
            Err(UniverseError::Budget { k: 5, size: 65536, .. })
        ));
        assert_eq!(Universe::build_vk(5, 100_000).unwrap().len(), 65536);
    }

    #[test]
    fn ranks_and_levels() {
        let v4 = Universe::build_vk(4, 10_000).unwrap();
        for &c in v4.carrier() {
            assert!(rank(c) < 4);
        }
        // V_j is an initial segment of V_k carrier-wise
        let v3 = Universe::build_vk(3, 10_000).unwrap();
        assert!(v3.carrier().iter().all(|c| v4.contains(*c)));
        assert_eq!(v4.level(3), v3.carrier().to_vec());
    }

    #[test]
    fn ordinal_codes() {
        assert_eq!(ordinal_code(0), 0);
        assert_eq!(ordinal_code(1), 1);
        assert_eq!(ordinal_code(2), 3);
        // ordinal 3 = {0, 1, 3} as codes
        assert_eq!(ordinal_code(3), 0b1011);
        assert_eq!(rank(ordinal_code(3)), 3);
    }

    #[test]
    fn transitivity_validation() {
        // {{∅}} without {∅}: code 2 has member 1
        let err = Universe::validate(vec![0, 2]).unwrap_err();
        assert!(matches!(err, UniverseError::NotTransitive { element: 2, member: 1 }));
        let ok = Universe::validate(vec![0, 1, 2]).unwrap();
        assert_eq!(ok.height(), 3);
    }

    #[test]
    fn transitive_slices() {
        for c in 1..=4 {
            let u = Universe::transitive_slice(c);
            assert_eq!(u.len(), c);
        }
    }

    #[test]
    fn ordinal_sentences_pick_out_heights() {
        // ordinal_sentence(n) holds classically in V_k exactly when k = n + 1
        for k in 0..=5usize {
            let u = Universe::build_vk(k, 100_000).unwrap();
            for n in 0..=4usize {
                let s = ordinal_sentence(n);
                let got = u.eval_sentence(&s).unwrap();
                assert_eq!(got, k == n + 1, "V_{k} vs ordinal_sentence({n})");
            }
        }
    }

    #[test]
    fn extensionality_holds_in_small_levels() {
        let ext = parse_set(
            "forall a . forall b . (forall x . (x in a -> x in b) & (x in b -> x in a)) -> a = b",
        )
        .unwrap();
        for k in 0..=4 {
            let u = Universe::build_vk(k, 10_000).unwrap();
            assert!(u.eval_sentence(&ext).unwrap(), "V_{k}");
        }
    }

    #[test]
    fn pair_exists_in_v3() {
        // the pair {∅, {∅}} is in V_3
        let phi = parse_set(
            "exists y . forall x . (x in y -> (forall z in x . bot) | (forall w . (w in x -> forall z in w . bot) & (exists u . u in x))) & ((forall z in x . bot) -> x in y)",
        )
        .unwrap();
        // simpler: there is a set containing the empty set and a nonempty set
        let simple = parse_set(
            "exists y . (exists a in y . forall z in a . bot) & (exists b in y . exists z . z in b)",
        )
        .unwrap();
        let v3 = Universe::build_vk(3, 10_000).unwrap();
        assert!(v3.eval_sentence(&simple).unwrap());
        let _ = phi;
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let v2 = Universe::build_vk(2, 10_000).unwrap();
        let open = parse_set("x in y").unwrap();
        assert!(matches!(
            v2.eval_sentence(&open),
            Err(UniverseError::UnboundVariable(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let v3 = Universe::build_vk(3, 10_000).unwrap();
        let j = v3.to_json();
        let back = Universe::from_json(&j).unwrap();
        assert_eq!(v3, back);
        // the empty set is []
        assert_eq!(code_to_json(0), serde_json::json!([]));
        assert_eq!(code_to_json(1), serde_json::json!([[]]));
    }

    /// Independent naive evaluator over decoded nested sets: different value
    /// representation (structural vectors instead of codes), different
    /// membership and equality routines, no bounded-quantifier shortcuts.
    mod naive {
        use super::super::*;

        #[derive(Clone, PartialEq, Eq)]
        pub struct Nested(pub Vec<Nested>);

        pub fn decode(code: SetCode) -> Nested {
            let mut elems: Vec<Nested> = members(code).map(decode).collect();
            // canonical order by structure
            elems.sort_by(|a, b| cmp(a, b));
            Nested(elems)
        }

        fn cmp(a: &Nested, b: &Nested) -> std::cmp::Ordering {
            (a.0.len().cmp(&b.0.len())).then_with(|| {
                for (x, y) in a.0.iter().zip(&b.0) {
                    let c = cmp(x, y);
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                std::cmp::Ordering::Equal
            })
        }

        fn member_of(x: &Nested, y: &Nested) -> bool {
            y.0.iter().any(|e| e == x)
        }

        pub fn eval(
            carrier: &[Nested],
            phi: &SetFormula,
            env: &mut Vec<(String, Nested)>,
        ) -> bool {
            let lookup = |v: &str, env: &Vec<(String, Nested)>| -> Nested {
                env.iter().rev().find(|(n, _)| n == v).map(|(_, c)| c.clone()).unwrap()
            };
            match phi {
                SetFormula::Bottom => false,
                SetFormula::In(x, y) => member_of(&lookup(x, env), &lookup(y, env)),
                SetFormula::Eq(x, y) => lookup(x, env) == lookup(y, env),
                SetFormula::And(a, b) => eval(carrier, a, env) && eval(carrier, b, env),
                SetFormula::Or(a, b) => eval(carrier, a, env) || eval(carrier, b, env),
                SetFormula::Implies(a, b) => !eval(carrier, a, env) || eval(carrier, b, env),
                SetFormula::Forall(x, body) => carrier.iter().all(|c| {
                    env.push((x.clone(), c.clone()));
                    let r = eval(carrier, body, env);
                    env.pop();
                    r
                }),
                SetFormula::Exists(x, body) => carrier.iter().any(|c| {
                    env.push((x.clone(), c.clone()));
                    let r = eval(carrier, body, env);
                    env.pop();
                    r
                }),
            }
        }
    }

    #[test]
    fn agrees_with_naive_evaluator_on_random_sentences() {
        use crate::sampling::SentenceSampler;

        let v3 = Universe::build_vk(3, 10_000).unwrap();
        let nested: Vec<naive::Nested> =
            v3.carrier().iter().map(|&c| naive::decode(c)).collect();
        let mut sampler = SentenceSampler::new(0xC0FFEE);
        for i in 0..50 {
            let phi = sampler.sentence(3);
            let fast = v3.eval_sentence(&phi).unwrap();
            let slow = naive::eval(&nested, &phi, &mut Vec::new());
            assert_eq!(fast, slow, "sentence {i}: {phi}");
        }
    }
}
