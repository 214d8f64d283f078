//! Generated sentences about von Neumann ordinals.
//!
//! `ord_formula(n, "x")` characterizes the ordinal `n` up to extensional
//! equality: `x` is transitive, linearly ordered by membership, and has
//! exactly `n` elements (the cardinality clause uses `n + 1` quantifiers).

use super::set::SetFormula;

/// `x` is transitive: every element of an element of `x` is in `x`.
fn transitive(x: &str) -> SetFormula {
    SetFormula::forall_in(
        "u",
        x,
        SetFormula::forall_in("w", "u", SetFormula::member("w", x)),
    )
}

/// Any two elements of `x` are comparable under membership or equal.
fn linear(x: &str) -> SetFormula {
    SetFormula::forall_in(
        "u",
        x,
        SetFormula::forall_in(
            "w",
            x,
            SetFormula::disj(vec![
                SetFormula::member("u", "w"),
                SetFormula::member("w", "u"),
                SetFormula::eq("u", "w"),
            ]),
        ),
    )
}

/// `x` has exactly `n` elements. The witnesses are bound with guarded
/// existentials `exists y in x . ...` so evaluators only ever enumerate the
/// members of `x`.
fn exactly_n(n: usize, x: &str) -> SetFormula {
    if n == 0 {
        return SetFormula::forall_in("y", x, SetFormula::Bottom);
    }
    let names: Vec<String> = (0..n).map(|i| format!("y{i}")).collect();
    let mut parts: Vec<SetFormula> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            parts.push(SetFormula::neg(SetFormula::eq(
                names[i].clone(),
                names[j].clone(),
            )));
        }
    }
    parts.push(SetFormula::forall_in(
        "z",
        x,
        SetFormula::disj(names.iter().map(|y| SetFormula::eq("z", y.clone())).collect()),
    ));
    let mut body = SetFormula::conj(parts);
    for y in names.into_iter().rev() {
        body = SetFormula::exists_in(&y, x, body);
    }
    body
}

/// `Ord_n(x)`: `x` is the von Neumann ordinal `n`, up to extensionality.
pub fn ord_formula(n: usize, x: &str) -> SetFormula {
    if n == 0 {
        return SetFormula::forall_in("y", x, SetFormula::Bottom);
    }
    SetFormula::conj(vec![transitive(x), linear(x), exactly_n(n, x)])
}

/// The sentence "the ordinal `n` exists and the ordinal `n + 1` does not".
///
/// Evaluated classically in a cumulative level `V_k` this holds exactly when
/// `k = n + 1`, which makes these sentences usable as end-node distinguishers.
pub fn ordinal_sentence(n: usize) -> SetFormula {
    let exists_n = SetFormula::exists("x", ord_formula(n, "x"));
    let exists_succ = SetFormula::exists("x", ord_formula(n + 1, "x"));
    SetFormula::and(exists_n, SetFormula::neg(exists_succ)).canonicalize()
}
