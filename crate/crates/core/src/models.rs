//! Possible-worlds sets: enumeration, intersection, proportions and sampling.

use std::sync::Arc;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::logic::{self, Formula, Limits, Universe, World};
use crate::scalar::Rational;
use crate::story::Fabula;

/// A set of worlds over one universe, ordered by assignment read as a binary
/// integer (bit `i` = atom `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldSet {
    universe: Arc<Universe>,
    worlds: Vec<u64>,
}

impl WorldSet {
    pub fn new(universe: Arc<Universe>, worlds: impl IntoIterator<Item = u64>) -> Result<Self> {
        let n = universe.atom_count();
        let mut worlds: Vec<u64> = worlds.into_iter().collect();
        for &w in &worlds {
            World::new(universe.clone(), w)?;
        }
        if n > logic::MAX_WORLD_ATOMS {
            return Err(Error::BoundExceeded {
                atoms: n,
                bound: logic::MAX_WORLD_ATOMS,
            });
        }
        worlds.sort_unstable();
        worlds.dedup();
        Ok(WorldSet { universe, worlds })
    }

    pub fn from_worlds<'a>(
        universe: Arc<Universe>,
        worlds: impl IntoIterator<Item = &'a World>,
    ) -> Result<Self> {
        let mut bits = Vec::new();
        for w in worlds {
            if !same_universe(&universe, w.universe()) {
                return Err(Error::UniverseMismatch);
            }
            bits.push(w.bits());
        }
        WorldSet::new(universe, bits)
    }

    pub(crate) fn from_sorted(universe: Arc<Universe>, worlds: Vec<u64>) -> Self {
        debug_assert!(worlds.windows(2).all(|w| w[0] < w[1]));
        WorldSet { universe, worlds }
    }

    /// Every world over `u`.
    pub fn all(universe: Arc<Universe>, limits: &Limits) -> Result<Self> {
        let worlds = logic::models(std::iter::empty(), &universe, limits)?;
        Ok(WorldSet::from_sorted(universe, worlds))
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    /// Raw assignments in canonical order.
    pub fn assignments(&self) -> &[u64] {
        &self.worlds
    }

    pub fn get(&self, i: usize) -> Option<World> {
        self.worlds
            .get(i)
            .map(|&b| World::from_parts(self.universe.clone(), b))
    }

    pub fn iter(&self) -> impl Iterator<Item = World> + '_ {
        self.worlds
            .iter()
            .map(|&b| World::from_parts(self.universe.clone(), b))
    }

    pub fn index_of(&self, w: &World) -> Option<usize> {
        if !same_universe(&self.universe, w.universe()) {
            return None;
        }
        self.worlds.binary_search(&w.bits()).ok()
    }

    pub fn contains(&self, w: &World) -> bool {
        self.index_of(w).is_some()
    }

    /// Which worlds satisfy `f`, by canonical position.
    pub fn support(&self, f: &Formula) -> Result<Vec<bool>> {
        let c = f.compile(&self.universe)?;
        Ok(self.worlds.iter().map(|&b| c.eval(b)).collect())
    }

    /// The worlds satisfying `f`.
    pub fn filter(&self, f: &Formula) -> Result<WorldSet> {
        let c = f.compile(&self.universe)?;
        let kept = self.worlds.iter().copied().filter(|&b| c.eval(b)).collect();
        Ok(WorldSet::from_sorted(self.universe.clone(), kept))
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        same_universe(&self.universe, &other.universe)
            && self
                .worlds
                .iter()
                .all(|w| other.worlds.binary_search(w).is_ok())
    }
}

pub(crate) fn same_universe(a: &Arc<Universe>, b: &Arc<Universe>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// `𝐒(t)`: every world satisfying the fabula.
pub fn enumerate_models(f: &Fabula, u: &Arc<Universe>, limits: &Limits) -> Result<WorldSet> {
    let worlds = logic::models(f.formulas(), u, limits)?;
    Ok(WorldSet::from_sorted(u.clone(), worlds))
}

/// Worlds present in both sets.
pub fn intersect(a: &WorldSet, b: &WorldSet) -> Result<WorldSet> {
    if !same_universe(&a.universe, &b.universe) {
        return Err(Error::UniverseMismatch);
    }
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.worlds.len() && j < b.worlds.len() {
        match a.worlds[i].cmp(&b.worlds[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a.worlds[i]);
                i += 1;
                j += 1;
            }
        }
    }
    Ok(WorldSet::from_sorted(a.universe.clone(), out))
}

/// Fraction of worlds in `s` where `q` holds.
pub fn truth_proportion(s: &WorldSet, q: &Formula) -> Result<Rational> {
    if s.is_empty() {
        return Err(Error::EmptyWorldSet);
    }
    let c = q.compile(&s.universe)?;
    let hits = s.worlds.iter().filter(|&&b| c.eval(b)).count();
    Ok(Rational::new(hits as u64, s.len() as u64))
}

/// True iff every world in `shared` satisfies every formula in `rho`.
pub fn agreement_check<'a>(
    shared: &WorldSet,
    rho: impl IntoIterator<Item = &'a Formula>,
) -> Result<bool> {
    let compiled = logic::compile_all(rho, &shared.universe)?;
    Ok(shared
        .worlds
        .iter()
        .all(|&b| compiled.iter().all(|c| c.eval(b))))
}

/// A seeded uniform sample of `min(k, |s|)` worlds, returned in canonical order.
pub fn sample_worlds(s: &WorldSet, k: usize, seed: u64) -> Result<WorldSet> {
    if k == 0 {
        return Err(Error::ZeroSample);
    }
    if s.is_empty() {
        return Err(Error::EmptyWorldSet);
    }
    if k >= s.len() {
        return Ok(s.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, s.len(), k).into_vec();
    picked.sort_unstable();
    let worlds = picked.into_iter().map(|i| s.worlds[i]).collect();
    Ok(WorldSet::from_sorted(s.universe.clone(), worlds))
}

/// The `min(k, |s|)` highest-scoring worlds; ties keep canonical order.
pub fn sample_worlds_by<K: Ord>(
    s: &WorldSet,
    k: usize,
    mut score: impl FnMut(&World) -> K,
) -> Result<WorldSet> {
    if k == 0 {
        return Err(Error::ZeroSample);
    }
    if s.is_empty() {
        return Err(Error::EmptyWorldSet);
    }
    let mut scored: Vec<(K, usize)> = s.iter().map(|w| score(&w)).zip(0..).collect();
    scored.sort_by(|(ka, ia), (kb, ib)| kb.cmp(ka).then(ia.cmp(ib)));
    let mut picked: Vec<u64> = scored.iter().take(k).map(|&(_, i)| s.worlds[i]).collect();
    picked.sort_unstable();
    Ok(WorldSet::from_sorted(s.universe.clone(), picked))
}
