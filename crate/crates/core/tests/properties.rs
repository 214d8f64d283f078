//! Property tests over the public API: printer/parser round trips,
//! persistence of forcing, and substitution homomorphism.

use proptest::prelude::*;

use kripke_blend::formulas::{
    apply_substitution, parse_prop, parse_set, PropFormula, SetFormula, Substitution,
};
use kripke_blend::frames::enumerate_trees;
use kripke_blend::propositional::{truth_mask, Valuation};

fn prop_formula() -> impl Strategy<Value = PropFormula> {
    let leaf = prop_oneof![
        Just(PropFormula::Bottom),
        prop_oneof![Just("p"), Just("q"), Just("r1")].prop_map(PropFormula::letter),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropFormula::implies(a, b)),
            inner.prop_map(PropFormula::neg),
        ]
    })
}

/// Closed set-theoretic formulas: generated under a binder stack so only
/// bound variables appear.
fn set_formula(depth: u32, vars: usize) -> BoxedStrategy<SetFormula> {
    let atom = if vars == 0 {
        Just(SetFormula::Bottom).boxed()
    } else {
        let var = move || (0..vars).prop_map(|i| format!("v{i}"));
        prop_oneof![
            Just(SetFormula::Bottom),
            (var(), var()).prop_map(|(x, y)| SetFormula::member(x, y)),
            (var(), var()).prop_map(|(x, y)| SetFormula::eq(x, y)),
        ]
        .boxed()
    };
    if depth == 0 {
        return atom;
    }
    let sub = set_formula(depth - 1, vars);
    let sub_bound = set_formula(depth - 1, vars + 1);
    prop_oneof![
        atom,
        (sub.clone(), sub.clone()).prop_map(|(a, b)| SetFormula::and(a, b)),
        (sub.clone(), sub.clone()).prop_map(|(a, b)| SetFormula::or(a, b)),
        (sub.clone(), sub.clone()).prop_map(|(a, b)| SetFormula::implies(a, b)),
        sub_bound.clone().prop_map(move |b| SetFormula::forall(format!("v{vars}"), b)),
        sub_bound.prop_map(move |b| SetFormula::exists(format!("v{vars}"), b)),
    ]
    .boxed()
}

proptest! {
    #[test]
    fn prop_print_parse_round_trip(phi in prop_formula()) {
        let printed = phi.to_string();
        let reparsed = parse_prop(&printed).unwrap();
        prop_assert_eq!(phi, reparsed);
    }

    #[test]
    fn set_print_parse_round_trip(phi in set_formula(3, 0)) {
        let canonical = phi.canonicalize();
        let reparsed = parse_set(&canonical.to_string()).unwrap();
        prop_assert_eq!(canonical, reparsed);
    }

    #[test]
    fn canonicalization_is_idempotent_and_preserves_free_vars(phi in set_formula(3, 2)) {
        let once = phi.canonicalize();
        prop_assert_eq!(once.clone(), once.canonicalize());
        prop_assert_eq!(phi.free_vars(), once.free_vars());
    }

    /// Truth sets are upsets on every frame: persistence of forcing.
    #[test]
    fn forcing_is_persistent(
        phi in prop_formula(),
        frame_idx in 0usize..17,
        up in 0usize..12,
        uq in 0usize..12,
        ur in 0usize..12,
    ) {
        let frames = enumerate_trees(5);
        let frame = &frames[frame_idx % frames.len()];
        let upsets = frame.upsets(frame.root());
        let mut map = std::collections::BTreeMap::new();
        map.insert("p".to_string(), upsets[up % upsets.len()]);
        map.insert("q".to_string(), upsets[uq % upsets.len()]);
        map.insert("r1".to_string(), upsets[ur % upsets.len()]);
        let valuation = Valuation::new(frame, map).unwrap();
        let mask = truth_mask(frame, &valuation, &phi).unwrap();
        prop_assert!(frame.is_upset(mask), "{phi} has non-upset truth set {mask:b}");
    }

    /// Substitution commutes with the connectives.
    #[test]
    fn substitution_is_homomorphic(a in prop_formula(), b in prop_formula()) {
        let image = parse_set("exists y . y = y").unwrap();
        let mut map = std::collections::BTreeMap::new();
        for letter in ["p", "q", "r1"] {
            map.insert(letter.to_string(), image.clone());
        }
        let sigma = Substitution::new(map).unwrap();
        let sa = apply_substitution(&a, &sigma).unwrap();
        let sb = apply_substitution(&b, &sigma).unwrap();
        let both = apply_substitution(&PropFormula::and(a.clone(), b.clone()), &sigma).unwrap();
        prop_assert_eq!(both, SetFormula::and(sa.clone(), sb.clone()));
        let either = apply_substitution(&PropFormula::or(a.clone(), b.clone()), &sigma).unwrap();
        prop_assert_eq!(either, SetFormula::or(sa.clone(), sb.clone()));
        let arrow = apply_substitution(&PropFormula::implies(a, b), &sigma).unwrap();
        prop_assert!(arrow.is_sentence());
        prop_assert_eq!(arrow, SetFormula::implies(sa, sb));
    }
}
