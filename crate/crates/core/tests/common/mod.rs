#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use storyworld::{Atom, Fabula, Formula, Limits, Timeline, Universe, World};

/// One sort `d` with `constants` members and one relation per entry of
/// `arities`, named `r0`, `r1`, ...
pub fn universe(constants: usize, arities: &[usize]) -> Arc<Universe> {
    let names: Vec<String> = (0..constants).map(|i| format!("c{i}")).collect();
    let mut b = Universe::builder().sort("d", names);
    for (i, &n) in arities.iter().enumerate() {
        b = b.relation(&format!("r{i}"), vec!["d"; n]);
    }
    Arc::new(b.build().unwrap())
}

pub fn atom_count(constants: usize, arities: &[usize]) -> usize {
    arities.iter().map(|&a| constants.pow(a as u32)).sum()
}

pub fn universes(max_atoms: usize) -> impl Strategy<Value = Arc<Universe>> {
    (1usize..=3, prop::collection::vec(1usize..=2, 1..=4))
        .prop_filter("too many atoms", move |(c, a)| atom_count(*c, a) <= max_atoms)
        .prop_map(|(c, a)| universe(c, &a))
}

pub fn formulas(atoms: Vec<Atom>, depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop::sample::select(atoms).prop_map(Formula::Atom);
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::negate),
            prop::collection::vec(inner.clone(), 0..=3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 0..=3).prop_map(Formula::Or),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::implies(l, r)),
        ]
    })
    .boxed()
}

/// A universe with a handful of random formulas over it.
pub fn universe_and_formulas(
    max_atoms: usize,
    count: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Arc<Universe>, Vec<Formula>)> {
    universes(max_atoms).prop_flat_map(move |u| {
        let fs = prop::collection::vec(formulas(u.atoms().to_vec(), 3), count.clone());
        (Just(u), fs)
    })
}

/// Every assignment satisfying all of `props`, by straight iteration.
pub fn brute_models(props: &[Formula], u: &Arc<Universe>) -> Vec<u64> {
    let n = u.atom_count();
    (0..1u64 << n)
        .filter(|&bits| {
            let w = World::new(u.clone(), bits).unwrap();
            props.iter().all(|p| w.evaluate(p).unwrap())
        })
        .collect()
}

/// Direct check of the weak filter and weak ultrafilter axioms over every
/// subset of an `n`-element base.
pub fn filter_axioms(members: &BTreeSet<u64>, n: usize) -> (bool, bool) {
    let full = (1u64 << n) - 1;
    let mut upward = true;
    for &x in members {
        for y in 0..=full {
            if y & x == x && !members.contains(&y) {
                upward = false;
            }
        }
    }
    let no_pair = members.iter().all(|&x| !members.contains(&(full & !x)));
    let weak = !members.is_empty() && upward && no_pair;
    let decides = (0..=full).all(|x| members.contains(&x) != members.contains(&(full & !x)));
    (weak, weak && decides)
}

/// Members of an upward-closed family generated by `gens`.
pub fn upward_closure(gens: &[u64], n: usize) -> BTreeSet<u64> {
    let full = (1u64 << n) - 1;
    (0..=full)
        .filter(|&y| gens.iter().any(|&g| g & !y == 0))
        .collect()
}

/// Weak filters over bases of 1 to `max_n` worlds: upward closures of
/// pairwise-intersecting non-empty generators.
pub fn weak_filters(max_n: usize) -> impl Strategy<Value = (usize, BTreeSet<u64>)> {
    (1usize..=max_n).prop_flat_map(|n| {
        let full = (1u64 << n) - 1;
        prop::collection::vec(1..=full, 1..=4).prop_map(move |gens| {
            let mut kept: Vec<u64> = Vec::new();
            for g in gens {
                if kept.iter().all(|&k| k & g != 0) {
                    kept.push(g);
                }
            }
            (n, upward_closure(&kept, n))
        })
    })
}

/// A universe, a pool of formulas all true in one hidden world (so any subset
/// is consistent), and per-step selections from the pool.
pub fn story_parts(
    max_atoms: usize,
) -> impl Strategy<Value = (Arc<Universe>, Vec<Formula>, Vec<Vec<bool>>)> {
    universes(max_atoms).prop_flat_map(|u| {
        let n = u.atom_count();
        let pool = prop::collection::vec(formulas(u.atoms().to_vec(), 2), 1..=6);
        (Just(u), 0u64..(1 << n), pool).prop_flat_map(|(u, hidden, pool)| {
            let w = World::new(u.clone(), hidden).unwrap();
            let kept: Vec<Formula> = pool.into_iter().filter(|f| w.evaluate(f).unwrap()).collect();
            let picks = prop::collection::vec(prop::collection::vec(any::<bool>(), kept.len()), 1..=5);
            (Just(u), Just(kept), picks)
        })
    })
}

pub fn timeline(u: &Arc<Universe>, pool: &[Formula], picks: &[Vec<bool>], cumulative: bool) -> Timeline {
    let lim = Limits::default();
    let mut acc = vec![false; pool.len()];
    let steps = picks
        .iter()
        .map(|p| {
            for (a, &b) in acc.iter_mut().zip(p) {
                *a = if cumulative { *a || b } else { b };
            }
            let fs = pool.iter().zip(&acc).filter(|(_, &k)| k).map(|(f, _)| f.clone());
            Fabula::new(fs, u, &lim).unwrap()
        })
        .collect();
    Timeline::new(u.clone(), steps, &lim).unwrap()
}
