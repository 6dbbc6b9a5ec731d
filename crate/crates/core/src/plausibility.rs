//! Weak filters and weak ultrafilters over finite world sets.
//!
//! A weak filter is a non-empty, upward-closed family of subsets of a base
//! world set that never holds a subset together with its complement. The ultra
//! variant holds exactly one of every subset/complement pair. Members are
//! subsets of canonical world positions in the base.
//!
//! Families are stored extensionally (a membership bit per subset) for bases of
//! up to [`MAX_EXTENSIONAL_BASE`] worlds. Principal filters, and their
//! canonical ultra extension, are stored by generator and work on any base.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{all_literals, Formula, Literal, World};
use crate::models::WorldSet;

/// Largest base that can hold an extensional family.
pub const MAX_EXTENSIONAL_BASE: usize = 24;

/// A subset of a base's canonical positions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    len: usize,
    words: Vec<u64>,
}

impl Subset {
    pub fn empty(len: usize) -> Self {
        Subset {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Subset::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    /// Bit `i` of `mask` is position `i`.
    pub fn from_mask(mask: u64, len: usize) -> Result<Self> {
        if len < 64 && mask >> len != 0 {
            return Err(Error::NotASubset { mask, base: len });
        }
        let mut s = Subset::empty(len);
        if len > 0 {
            s.words[0] = mask;
        }
        Ok(s)
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Subset::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn from_bools(flags: &[bool]) -> Self {
        Subset::from_indices(flags.len(), flags.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "position {i} outside a base of {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn complement(&self) -> Self {
        Subset::from_indices(self.len, (0..self.len).filter(|&i| !self.contains(i)))
    }

    pub fn is_superset_of(&self, other: &Subset) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| b & !a == 0)
    }

    pub fn intersects(&self, other: &Subset) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }

    pub fn min_index(&self) -> Option<usize> {
        self.indices().next()
    }

    pub fn to_mask(&self) -> Option<u64> {
        (self.len <= 64).then(|| self.words.first().copied().unwrap_or(0))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

/// Membership bit per subset mask of a small base.
#[derive(Clone, PartialEq, Eq)]
struct Table {
    n: usize,
    bits: Vec<u64>,
}

impl Table {
    fn new(n: usize) -> Self {
        let size = 1usize << n;
        Table {
            n,
            bits: vec![0; size.div_ceil(64)],
        }
    }

    fn from_masks(n: usize, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        if n > MAX_EXTENSIONAL_BASE {
            return Err(Error::BaseTooLarge {
                found: n,
                max: MAX_EXTENSIONAL_BASE,
            });
        }
        let mut t = Table::new(n);
        for m in masks {
            if m >> n != 0 {
                return Err(Error::NotASubset { mask: m, base: n });
            }
            t.set(m);
        }
        Ok(t)
    }

    fn full_mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    fn get(&self, m: u64) -> bool {
        self.bits[(m / 64) as usize] >> (m % 64) & 1 == 1
    }

    fn set(&mut self, m: u64) {
        self.bits[(m / 64) as usize] |= 1 << (m % 64);
    }

    fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.full_mask()).filter(|&m| self.get(m))
    }

    fn is_weak_filter(&self) -> bool {
        let full = self.full_mask();
        let mut any = false;
        for x in self.masks() {
            any = true;
            if self.get(full & !x) {
                return false;
            }
            // one-element extensions suffice for upward closure
            for i in 0..self.n {
                if x >> i & 1 == 0 && !self.get(x | 1 << i) {
                    return false;
                }
            }
        }
        any
    }

    fn is_weak_ultrafilter(&self) -> bool {
        let full = self.full_mask();
        self.is_weak_filter() && (0..=full).all(|x| self.get(x) != self.get(full & !x))
    }
}

#[derive(Clone, PartialEq, Eq)]
enum Members {
    Explicit(Table),
    /// All supersets of the generator.
    Principal(Subset),
    /// Canonical ultra extension of `Principal`: supersets of the generator,
    /// plus every set holding position 0 that meets the generator.
    Extended(Subset),
}

/// True iff `members` (subset masks over a base of `base` worlds) is a weak
/// filter: non-empty, upward closed, free of complementary pairs.
pub fn is_weak_filter(members: impl IntoIterator<Item = u64>, base: usize) -> Result<bool> {
    Ok(Table::from_masks(base, members)?.is_weak_filter())
}

/// True iff `members` is a weak filter that decides every subset/complement pair.
pub fn is_weak_ultrafilter(members: impl IntoIterator<Item = u64>, base: usize) -> Result<bool> {
    Ok(Table::from_masks(base, members)?.is_weak_ultrafilter())
}

/// Whether a filter deems a proposition plausible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Plausibility {
    Plausible,
    Implausible,
    Undetermined,
}

/// A validated weak filter over a base world set.
#[derive(Clone, PartialEq, Eq)]
pub struct WeakFilter {
    base: WorldSet,
    members: Members,
}

impl fmt::Debug for WeakFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let form = match &self.members {
            Members::Explicit(t) => format!("explicit({} members)", t.masks().count()),
            Members::Principal(g) => format!("principal({g:?})"),
            Members::Extended(g) => format!("extended({g:?})"),
        };
        write!(f, "WeakFilter {{ base: {} worlds, {form} }}", self.base.len())
    }
}

impl WeakFilter {
    /// An extensional filter; `members` are masks over canonical base positions.
    pub fn new(base: WorldSet, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let table = Table::from_masks(base.len(), members)?;
        if !table.is_weak_filter() {
            return Err(Error::NotAWeakFilter);
        }
        Ok(WeakFilter {
            base,
            members: Members::Explicit(table),
        })
    }

    /// All supersets of `generator`.
    pub fn principal(base: WorldSet, generator: Subset) -> Result<Self> {
        if generator.len() != base.len() {
            return Err(Error::NotASubset {
                mask: generator.to_mask().unwrap_or(u64::MAX),
                base: base.len(),
            });
        }
        if generator.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(WeakFilter {
            base,
            members: Members::Principal(generator),
        })
    }

    /// `{base}`: only what every world agrees on is plausible.
    pub fn minimal(base: WorldSet) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::EmptyWorldSet);
        }
        let full = Subset::full(base.len());
        WeakFilter::principal(base, full)
    }

    pub fn base(&self) -> &WorldSet {
        &self.base
    }

    pub fn contains(&self, x: &Subset) -> bool {
        if x.len() != self.base.len() {
            return false;
        }
        match &self.members {
            Members::Explicit(t) => t.get(x.to_mask().expect("extensional bases fit a mask")),
            Members::Principal(g) => x.is_superset_of(g),
            Members::Extended(g) => x.is_superset_of(g) || (x.contains(0) && x.intersects(g)),
        }
    }

    pub fn contains_mask(&self, mask: u64) -> Result<bool> {
        Ok(self.contains(&Subset::from_mask(mask, self.base.len())?))
    }

    /// Members as masks in ascending order, when the base is small enough to
    /// list them.
    pub fn member_masks(&self) -> Result<Vec<u64>> {
        let n = self.base.len();
        if n > MAX_EXTENSIONAL_BASE {
            return Err(Error::BaseTooLarge {
                found: n,
                max: MAX_EXTENSIONAL_BASE,
            });
        }
        if let Members::Explicit(t) = &self.members {
            return Ok(t.masks().collect());
        }
        Ok((0..1u64 << n)
            .filter(|&m| self.contains(&Subset::from_mask(m, n).expect("in range")))
            .collect())
    }

    /// Positions of the base worlds satisfying `p`.
    pub fn support(&self, p: &Formula) -> Result<Subset> {
        Ok(Subset::from_bools(&self.base.support(p)?))
    }
}

/// A validated weak ultrafilter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakUltrafilter(WeakFilter);

impl WeakUltrafilter {
    pub fn new(base: WorldSet, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let table = Table::from_masks(base.len(), members)?;
        if !table.is_weak_ultrafilter() {
            return Err(Error::NotAWeakUltrafilter);
        }
        Ok(WeakUltrafilter(WeakFilter {
            base,
            members: Members::Explicit(table),
        }))
    }

    /// Every subset containing base position `i`.
    pub fn principal_at(base: WorldSet, i: usize) -> Result<Self> {
        if i >= base.len() {
            return Err(Error::EmptySubset);
        }
        let g = Subset::from_indices(base.len(), [i]);
        Ok(WeakUltrafilter(WeakFilter::principal(base, g)?))
    }

    pub fn as_filter(&self) -> &WeakFilter {
        &self.0
    }
}

impl Deref for WeakUltrafilter {
    type Target = WeakFilter;

    fn deref(&self) -> &WeakFilter {
        &self.0
    }
}

/// Extends a weak filter to a weak ultrafilter.
///
/// Subsets are visited in ascending mask order. When neither a subset nor its
/// complement is a member, the one whose smallest position is lower joins.
/// That is always the one holding position 0, so every set it forces in by
/// upward closure is also admitted when visited.
pub fn extend_to_ultrafilter(f: &WeakFilter) -> WeakUltrafilter {
    let members = match &f.members {
        Members::Explicit(t) => {
            let mut out = t.clone();
            let full = t.full_mask();
            for x in 0..=full {
                let c = full & !x;
                if out.get(x) || out.get(c) {
                    continue;
                }
                let x_first = if x == 0 { u32::MAX } else { x.trailing_zeros() };
                let c_first = if c == 0 { u32::MAX } else { c.trailing_zeros() };
                out.set(if x_first < c_first { x } else { c });
            }
            debug_assert!(out.is_weak_ultrafilter());
            Members::Explicit(out)
        }
        Members::Principal(g) | Members::Extended(g) => Members::Extended(g.clone()),
    };
    WeakUltrafilter(WeakFilter {
        base: f.base.clone(),
        members,
    })
}

/// The candidates true in every world of `member` (positions in `base`).
/// With no candidates given, every ground literal is a candidate.
pub fn plausible_facts(
    base: &WorldSet,
    member: &Subset,
    candidates: Option<&[Formula]>,
) -> Result<Vec<Formula>> {
    if member.len() != base.len() {
        return Err(Error::NotASubset {
            mask: member.to_mask().unwrap_or(u64::MAX),
            base: base.len(),
        });
    }
    if member.is_empty() {
        return Err(Error::EmptySubset);
    }
    let universe = base.universe();
    let defaults: Vec<Formula>;
    let candidates = match candidates {
        Some(c) => c,
        None => {
            defaults = all_literals(universe).into_iter().map(|l| l.to_formula(universe)).collect();
            &defaults
        }
    };
    let mut out = Vec::new();
    for q in candidates {
        let c = q.compile(universe)?;
        let assignments = base.assignments();
        if member.indices().all(|i| c.eval(assignments[i])) {
            out.push(q.clone());
        }
    }
    Ok(out)
}

/// Ground literals on which every world of `s` agrees.
pub fn decided_literals(s: &WorldSet) -> BTreeSet<Literal> {
    let n = s.universe().atom_count();
    let Some((&first, rest)) = s.assignments().split_first() else {
        return BTreeSet::new();
    };
    let mut differs = 0u64;
    for &w in rest {
        differs |= w ^ first;
    }
    (0..n)
        .filter(|i| differs >> i & 1 == 0)
        .map(|i| Literal::new(i, first >> i & 1 == 1))
        .collect()
}

/// Plausible if the worlds satisfying `p` form a member, implausible if the
/// rest do, undetermined otherwise.
pub fn plausibility_status(f: &WeakFilter, p: &Formula) -> Result<Plausibility> {
    let support = f.support(p)?;
    Ok(if f.contains(&support) {
        Plausibility::Plausible
    } else if f.contains(&support.complement()) {
        Plausibility::Implausible
    } else {
        Plausibility::Undetermined
    })
}

/// The world whose atoms are true exactly when their support is a member.
pub fn ultraproduct(uf: &WeakUltrafilter) -> Result<World> {
    let base = uf.base();
    if base.is_empty() {
        return Err(Error::EmptyWorldSet);
    }
    let n = base.universe().atom_count();
    let mut bits = 0u64;
    for atom in 0..n {
        let support = Subset::from_indices(
            base.len(),
            base.assignments()
                .iter()
                .enumerate()
                .filter(|(_, &w)| w >> atom & 1 == 1)
                .map(|(i, _)| i),
        );
        if uf.contains(&support) {
            bits |= 1 << atom;
        }
    }
    World::new(base.universe().clone(), bits)
}
