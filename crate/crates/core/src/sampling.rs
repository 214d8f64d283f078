//! Seeded random generation of set-theoretic sentences and formulas, used by
//! the sampled property checks. A fixed seed yields a fixed sample sequence.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formulas::SetFormula;

pub struct SentenceSampler {
    rng: ChaCha8Rng,
}

impl SentenceSampler {
    pub fn new(seed: u64) -> Self {
        SentenceSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A closed formula with quantifier depth at most `max_q` (at least 1).
    pub fn sentence(&mut self, max_q: usize) -> SetFormula {
        let f = self.closed(max_q.max(1), 2);
        f.canonicalize()
    }

    /// A formula whose free variables come from `free`; quantifier depth at
    /// most `max_q`.
    pub fn open_formula(&mut self, free: &[String], max_q: usize) -> SetFormula {
        let mut bound: Vec<String> = free.to_vec();
        let f = self.formula(&mut bound, max_q, 2);
        f
    }

    fn closed(&mut self, max_q: usize, conn_budget: usize) -> SetFormula {
        // start under a quantifier so the result is a sentence
        let var = self.fresh_var(0);
        let mut bound = vec![var.clone()];
        let body = self.formula(&mut bound, max_q - 1, conn_budget);
        if self.rng.gen_bool(0.5) {
            SetFormula::forall(var, body)
        } else {
            SetFormula::exists(var, body)
        }
    }

    fn fresh_var(&mut self, depth: usize) -> String {
        format!("v{depth}")
    }

    fn formula(&mut self, bound: &mut Vec<String>, max_q: usize, conn: usize) -> SetFormula {
        let can_quantify = max_q > 0;
        let can_connect = conn > 0;
        let pick = self.rng.gen_range(0..100);
        if can_quantify && pick < 35 {
            let var = self.fresh_var(bound.len());
            bound.push(var.clone());
            let body = self.formula(bound, max_q - 1, conn);
            bound.pop();
            return if self.rng.gen_bool(0.5) {
                SetFormula::forall(var, body)
            } else {
                SetFormula::exists(var, body)
            };
        }
        if can_connect && pick < 80 {
            let a = self.formula(bound, max_q, conn - 1);
            let b = self.formula(bound, max_q, conn - 1);
            return match self.rng.gen_range(0..4) {
                0 => SetFormula::and(a, b),
                1 => SetFormula::or(a, b),
                2 => SetFormula::implies(a, b),
                _ => SetFormula::neg(a),
            };
        }
        self.atom(bound, max_q, conn)
    }

    fn atom(&mut self, bound: &mut Vec<String>, max_q: usize, conn: usize) -> SetFormula {
        if bound.is_empty() {
            // no variables in scope: fall back to a quantifier or bottom
            if max_q > 0 {
                let var = self.fresh_var(0);
                bound.push(var.clone());
                let body = self.formula(bound, max_q - 1, conn);
                bound.pop();
                return SetFormula::exists(var, body);
            }
            return SetFormula::Bottom;
        }
        let x = bound[self.rng.gen_range(0..bound.len())].clone();
        let y = bound[self.rng.gen_range(0..bound.len())].clone();
        match self.rng.gen_range(0..5) {
            0 | 1 => SetFormula::member(x, y),
            2 | 3 => SetFormula::eq(x, y),
            _ => SetFormula::Bottom,
        }
    }
}

/// The systematic quantifier-depth-2 sentence family used for end-node
/// agreement sweeps. Every sentence is closed and has quantifier depth at
/// most 2; the family has well over 500 members.
pub fn depth_two_family() -> Vec<SetFormula> {
    let mut out = Vec::new();
    let q = |universal: bool, var: &str, body: SetFormula| {
        if universal {
            SetFormula::forall(var, body)
        } else {
            SetFormula::exists(var, body)
        }
    };
    let unary_atoms = |x: &str| -> Vec<SetFormula> {
        vec![
            SetFormula::eq(x, x),
            SetFormula::member(x, x),
            SetFormula::neg(SetFormula::member(x, x)),
            SetFormula::Bottom,
        ]
    };
    let binary_atoms = |x: &str, y: &str| -> Vec<SetFormula> {
        vec![
            SetFormula::member(y, x),
            SetFormula::member(x, y),
            SetFormula::eq(x, y),
            SetFormula::neg(SetFormula::member(y, x)),
            SetFormula::neg(SetFormula::eq(x, y)),
            SetFormula::and(SetFormula::member(y, x), SetFormula::neg(SetFormula::eq(x, y))),
        ]
    };
    // Q1 x . alpha(x)
    for q1 in [true, false] {
        for a in unary_atoms("x") {
            out.push(q(q1, "x", a));
        }
    }
    // Q1 x . (alpha(x) o Q2 y . beta(x, y))
    for q1 in [true, false] {
        for q2 in [true, false] {
            for a in unary_atoms("x") {
                for b in binary_atoms("x", "y") {
                    let inner = q(q2, "y", b);
                    for op in 0..3 {
                        let body = match op {
                            0 => SetFormula::and(a.clone(), inner.clone()),
                            1 => SetFormula::or(a.clone(), inner.clone()),
                            _ => SetFormula::implies(a.clone(), inner.clone()),
                        };
                        out.push(q(q1, "x", body));
                    }
                }
            }
        }
    }
    // Q1 x . Q2 y . (beta1 o beta2)
    for q1 in [true, false] {
        for q2 in [true, false] {
            for b1 in binary_atoms("x", "y") {
                for b2 in binary_atoms("x", "y") {
                    for op in 0..2 {
                        let body = match op {
                            0 => SetFormula::and(b1.clone(), b2.clone()),
                            _ => SetFormula::implies(b1.clone(), b2.clone()),
                        };
                        out.push(q(q1, "x", q(q2, "y", body)));
                    }
                }
            }
        }
    }
    out.into_iter().map(|f| f.canonicalize()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_sentences_are_closed() {
        let mut s = SentenceSampler::new(7);
        for _ in 0..100 {
            let f = s.sentence(3);
            assert!(f.is_sentence(), "{f}");
            assert!(f.quantifier_depth() <= 4);
        }
    }

    #[test]
    fn sampling_is_deterministic_under_a_seed() {
        let mut a = SentenceSampler::new(42);
        let mut b = SentenceSampler::new(42);
        for _ in 0..20 {
            assert_eq!(a.sentence(3), b.sentence(3));
        }
    }

    #[test]
    fn family_is_large_closed_and_shallow() {
        let fam = depth_two_family();
        assert!(fam.len() >= 500, "family has {} members", fam.len());
        for f in &fam {
            assert!(f.is_sentence());
            assert!(f.quantifier_depth() <= 2);
        }
        // no duplicates after canonicalization
        let mut seen = std::collections::BTreeSet::new();
        let mut dups = 0;
        for f in &fam {
            if !seen.insert(f.clone()) {
                dups += 1;
            }
        }
        assert!(dups * 10 < fam.len(), "too many duplicates: {dups}");
    }
}
