mod common;

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use storyworld::plausibility::{
    extend_to_ultrafilter, is_weak_filter, is_weak_ultrafilter, plausibility_status, ultraproduct,
    Plausibility, WeakFilter, WeakUltrafilter,
};
use storyworld::{Formula, Universe, WorldSet};

use common::{filter_axioms, formulas, universe, upward_closure, weak_filters};

/// Four unary atoms over one constant: 16 worlds.
fn four_atoms() -> Arc<Universe> {
    universe(1, &[1, 1, 1, 1])
}

fn base(u: &Arc<Universe>, worlds: &[u64]) -> WorldSet {
    WorldSet::new(u.clone(), worlds.iter().copied()).unwrap()
}

/// Every weak ultrafilter over bases of 1 to 4 worlds, found by checking every
/// family of subsets against the axioms.
fn all_ultrafilters() -> &'static Vec<(usize, BTreeSet<u64>)> {
    static CELL: OnceLock<Vec<(usize, BTreeSet<u64>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for n in 1..=4usize {
            let subsets = 1usize << n;
            for family in 0u64..(1u64 << subsets) {
                let members: BTreeSet<u64> = (0..subsets as u64).filter(|&m| family >> m & 1 == 1).collect();
                if filter_axioms(&members, n).1 {
                    out.push((n, members));
                }
            }
        }
        out
    })
}

fn families(max_n: usize) -> impl Strategy<Value = (usize, BTreeSet<u64>)> {
    (1usize..=max_n).prop_flat_map(|n| {
        let full = (1u64 << n) - 1;
        let raw = prop::collection::btree_set(0..=full, 0..=(1usize << n));
        let closed = prop::collection::vec(0..=full, 1..=3).prop_map(move |g| upward_closure(&g, n));
        (Just(n), prop_oneof![raw, closed])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn classification_matches_axioms((n, members) in families(5)) {
        let (weak, ultra) = filter_axioms(&members, n);
        prop_assert_eq!(is_weak_filter(members.iter().copied(), n).unwrap(), weak);
        prop_assert_eq!(is_weak_ultrafilter(members.iter().copied(), n).unwrap(), ultra);
    }

    #[test]
    fn extension_contains_input_and_is_ultra((n, members) in weak_filters(5)) {
        prop_assert!(filter_axioms(&members, n).0);
        let u = universe(1, &[1, 1, 1]);
        let b = base(&u, &(0..n as u64).collect::<Vec<_>>());
        let f = WeakFilter::new(b, members.iter().copied()).unwrap();
        let uf = extend_to_ultrafilter(&f);
        let out: BTreeSet<u64> = uf.member_masks().unwrap().into_iter().collect();
        prop_assert!(members.is_subset(&out));
        prop_assert!(filter_axioms(&out, n).1);
        let again: BTreeSet<u64> = extend_to_ultrafilter(&f).member_masks().unwrap().into_iter().collect();
        prop_assert_eq!(out, again);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn never_both_plausible(
        (n, members) in weak_filters(4),
        p in formulas(four_atoms().atoms().to_vec(), 3),
        worlds in prop::collection::btree_set(0u64..16, 4),
    ) {
        let u = four_atoms();
        let w: Vec<u64> = worlds.into_iter().take(n).collect();
        let f = WeakFilter::new(base(&u, &w), members.iter().copied()).unwrap();
        let pos = plausibility_status(&f, &p).unwrap();
        let neg = plausibility_status(&f, &p.clone().negate()).unwrap();
        prop_assert!(!(pos == Plausibility::Plausible && neg == Plausibility::Plausible));
        prop_assert_eq!(pos == Plausibility::Plausible, neg == Plausibility::Implausible);
    }

    #[test]
    fn vote_holds_for_every_formula_under_closed_ultrafilters(
        p in formulas(four_atoms().atoms().to_vec(), 3),
        worlds in prop::collection::btree_set(0u64..16, 4),
    ) {
        let u = four_atoms();
        let worlds: Vec<u64> = worlds.into_iter().collect();
        for (n, members) in all_ultrafilters().iter().filter(|(_, m)| closed_under_meets(m)) {
            let uf = WeakUltrafilter::new(base(&u, &worlds[..*n]), members.iter().copied()).unwrap();
            let w = ultraproduct(&uf).unwrap();
            let support = uf.support(&p).unwrap();
            prop_assert_eq!(w.evaluate(&p).unwrap(), uf.contains(&support));
        }
    }

    #[test]
    fn vote_holds_for_literals_under_every_weak_ultrafilter(
        atom in 0usize..4,
        negations in 0usize..4,
        worlds in prop::collection::btree_set(0u64..16, 4),
    ) {
        let u = four_atoms();
        let mut p = Formula::Atom(u.atom(atom).clone());
        for _ in 0..negations {
            p = p.negate();
        }
        let worlds: Vec<u64> = worlds.into_iter().collect();
        for (n, members) in all_ultrafilters() {
            let uf = WeakUltrafilter::new(base(&u, &worlds[..*n]), members.iter().copied()).unwrap();
            let w = ultraproduct(&uf).unwrap();
            prop_assert_eq!(w.evaluate(&p).unwrap(), uf.contains(&uf.support(&p).unwrap()));
        }
    }
}

fn closed_under_meets(members: &BTreeSet<u64>) -> bool {
    members.iter().all(|a| members.iter().all(|b| members.contains(&(a & b))))
}

/// The majority family over three worlds is a weak ultrafilter, yet it admits
/// `a` and `b` without admitting `a & b`, so the atom-wise vote does not carry
/// over to conjunctions.
#[test]
fn vote_can_fail_for_conjunctions_under_majority() {
    let u = four_atoms();
    let a = Formula::atom("r0", ["c0"]);
    let b = Formula::atom("r1", ["c0"]);
    // a true in worlds 0 and 1, b true in worlds 1 and 2
    let b3 = base(&u, &[0b0001, 0b0011, 0b0010]);
    let majority = [0b011u64, 0b101, 0b110, 0b111];
    let uf = WeakUltrafilter::new(b3, majority).unwrap();
    let w = ultraproduct(&uf).unwrap();
    let both = Formula::and([a, b]);
    assert!(w.evaluate(&both).unwrap());
    assert!(!uf.contains(&uf.support(&both).unwrap()));
}

#[test]
fn ultrafilters_found_by_search_are_accepted() {
    let u = four_atoms();
    let worlds = [0, 3, 5, 14];
    assert!(all_ultrafilters().len() > 4);
    for (n, members) in all_ultrafilters() {
        assert!(WeakUltrafilter::new(base(&u, &worlds[..*n]), members.iter().copied()).is_ok());
    }
}
