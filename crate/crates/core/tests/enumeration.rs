mod common;

use std::sync::Arc;

use proptest::prelude::*;
use storyworld::logic::{consistent, entails, ground_atoms};
use storyworld::models::{enumerate_models, sample_worlds, truth_proportion};
use storyworld::{Fabula, Formula, Limits, Rational, Universe, WorldSet};

use common::{brute_models, universe, universe_and_formulas};

fn cards() -> Arc<Universe> {
    Arc::new(
        Universe::builder()
            .sort("person", ["jay", "ali"])
            .sort("color", ["blue", "red"])
            .relation("wears", ["person", "color"])
            .relation("plays", ["person", "person"])
            .build()
            .unwrap(),
    )
}

#[test]
fn golden_atom_order() {
    let names: Vec<String> = ground_atoms(&cards()).iter().map(|a| a.to_string()).collect();
    assert_eq!(
        names,
        [
            "plays(ali, ali)",
            "plays(ali, jay)",
            "plays(jay, ali)",
            "plays(jay, jay)",
            "wears(ali, blue)",
            "wears(ali, red)",
            "wears(jay, blue)",
            "wears(jay, red)",
        ]
    );
}

#[test]
fn golden_sample() {
    let u = cards();
    let f1 = Fabula::new(
        [Formula::atom("wears", ["jay", "blue"]), Formula::atom("plays", ["ali", "jay"])],
        &u,
        &Limits::default(),
    )
    .unwrap();
    let s = enumerate_models(&f1, &u, &Limits::default()).unwrap();
    let picked = sample_worlds(&s, 16, 2024).unwrap();
    assert_eq!(picked.assignments(), GOLDEN_SAMPLE);
}

const GOLDEN_SAMPLE: &[u64] = &[
    66, 82, 87, 106, 115, 123, 203, 206, 207, 218, 219, 223, 226, 246, 251, 254,
];

#[test]
fn fixture_oracle() {
    let u = cards();
    let f1 = [Formula::atom("wears", ["jay", "blue"]), Formula::atom("plays", ["ali", "jay"])];
    let fabula = Fabula::new(f1.clone(), &u, &Limits::default()).unwrap();
    let s = enumerate_models(&fabula, &u, &Limits::default()).unwrap();
    assert_eq!(s.assignments(), brute_models(&f1, &u));
    assert_eq!(s.len(), 64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn enumeration_matches_brute_force((u, fs) in universe_and_formulas(12, 0..=4)) {
        let lim = Limits::default();
        let expected = brute_models(&fs, &u);
        prop_assert_eq!(consistent(&fs, &u, &lim).unwrap(), !expected.is_empty());
        match Fabula::new(fs.clone(), &u, &lim) {
            Ok(f) => {
                let got = enumerate_models(&f, &u, &lim).unwrap();
                prop_assert_eq!(got.assignments(), &expected[..]);
            }
            Err(e) => {
                prop_assert!(e.is_inconsistency());
                prop_assert!(expected.is_empty());
            }
        }
    }

    #[test]
    fn entailment_is_refutation((u, mut fs) in universe_and_formulas(10, 1..=4)) {
        let lim = Limits::default();
        let q = fs.pop().unwrap();
        let mut with_negation = fs.clone();
        with_negation.push(q.clone().negate());
        prop_assert_eq!(
            entails(&fs, &q, &u, &lim).unwrap(),
            !consistent(&with_negation, &u, &lim).unwrap()
        );
    }

    #[test]
    fn proportions_of_complements_sum_to_one((u, fs) in universe_and_formulas(10, 1..=1)) {
        let s = WorldSet::all(u, &Limits::default()).unwrap();
        let q = &fs[0];
        let total = truth_proportion(&s, q).unwrap() + truth_proportion(&s, &q.clone().negate()).unwrap();
        prop_assert_eq!(total, Rational::from_integer(1));
    }
}

#[test]
fn empty_fabula_has_every_world() {
    for (c, arities) in [(1, vec![1]), (2, vec![1, 2]), (3, vec![1, 1, 2]), (2, vec![2, 2, 2, 1, 1])] {
        let u = universe(c, &arities);
        let n = u.atom_count();
        assert!(n <= 16);
        let s = enumerate_models(&Fabula::empty(), &u, &Limits::default()).unwrap();
        assert_eq!(s.len(), 1 << n);
    }
}

#[test]
fn bound_refusal_names_the_bound() {
    let u = universe(3, &[2, 2, 2]);
    let err = enumerate_models(&Fabula::empty(), &u, &Limits::default()).unwrap_err();
    assert!(err.to_string().contains("24"), "{err}");
}
