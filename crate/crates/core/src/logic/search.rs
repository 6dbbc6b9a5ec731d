//! Model search over the ground atoms of a finite universe.
//!
//! Atoms are decided from the highest index down, `false` before `true`, with
//! three-valued pruning. Once every formula is already satisfied the remaining
//! low atoms are free, and all their completions are emitted in ascending
//! order. Models therefore come out sorted by their assignment read as a
//! binary integer.

use std::ops::ControlFlow;

use serde::Serialize;

use super::formula::{Compiled, Formula};
use super::universe::Universe;
use super::world::MAX_WORLD_ATOMS;
use crate::error::{Error, Result};

/// Enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    max_atoms: usize,
}

impl Limits {
    pub const DEFAULT_MAX_ATOMS: usize = 24;

    pub fn new(max_atoms: usize) -> Result<Self> {
        if max_atoms == 0 || max_atoms > MAX_WORLD_ATOMS {
            return Err(Error::InvalidBound {
                found: max_atoms,
                max: MAX_WORLD_ATOMS,
            });
        }
        Ok(Limits { max_atoms })
    }

    pub fn max_atoms(&self) -> usize {
        self.max_atoms
    }

    pub fn check(&self, u: &Universe) -> Result<()> {
        if u.atom_count() > self.max_atoms {
            return Err(Error::BoundExceeded {
                atoms: u.atom_count(),
                bound: self.max_atoms,
            });
        }
        Ok(())
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_atoms: Self::DEFAULT_MAX_ATOMS,
        }
    }
}

fn low_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Visits every model of `formulas` over `n` atoms in ascending order.
pub(crate) fn for_each_model(
    n: usize,
    formulas: &[Compiled],
    visit: &mut impl FnMut(u64) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let active: Vec<usize> = (0..formulas.len()).collect();
    descend(n, n, 0, &active, formulas, visit)
}

fn descend(
    n: usize,
    level: usize,
    bits: u64,
    active: &[usize],
    formulas: &[Compiled],
    visit: &mut impl FnMut(u64) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let assigned = low_mask(n) & !low_mask(level);
    let mut open = Vec::with_capacity(active.len());
    for &i in active {
        match formulas[i].eval_partial(assigned, bits) {
            Some(false) => return ControlFlow::Continue(()),
            Some(true) => {}
            None => open.push(i),
        }
    }
    if open.is_empty() {
        for low in 0..=low_mask(level) {
            visit(bits | low)?;
        }
        return ControlFlow::Continue(());
    }
    // every formula is decided once all atoms are assigned
    debug_assert!(level > 0);
    let next = level - 1;
    descend(n, next, bits, &open, formulas, visit)?;
    descend(n, next, bits | 1 << next, &open, formulas, visit)
}

pub(crate) fn compile_all<'a>(
    props: impl IntoIterator<Item = &'a Formula>,
    u: &Universe,
) -> Result<Vec<Compiled>> {
    props.into_iter().map(|f| f.compile(u)).collect()
}

/// All models of `props`, ascending.
pub(crate) fn models<'a>(
    props: impl IntoIterator<Item = &'a Formula>,
    u: &Universe,
    limits: &Limits,
) -> Result<Vec<u64>> {
    let compiled = compile_all(props, u)?;
    limits.check(u)?;
    let mut out = Vec::new();
    let _ = for_each_model(u.atom_count(), &compiled, &mut |bits| {
        out.push(bits);
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// True iff some world satisfies every formula in `props`.
pub fn consistent<'a>(
    props: impl IntoIterator<Item = &'a Formula>,
    u: &Universe,
    limits: &Limits,
) -> Result<bool> {
    let compiled = compile_all(props, u)?;
    limits.check(u)?;
    Ok(for_each_model(u.atom_count(), &compiled, &mut |_| ControlFlow::Break(())).is_break())
}

/// True iff every model of `props` satisfies `q`.
pub fn entails<'a>(
    props: impl IntoIterator<Item = &'a Formula>,
    q: &Formula,
    u: &Universe,
    limits: &Limits,
) -> Result<bool> {
    let compiled = compile_all(props, u)?;
    let goal = q.compile(u)?;
    limits.check(u)?;
    let counterexample = for_each_model(u.atom_count(), &compiled, &mut |bits| {
        if goal.eval(bits) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    });
    Ok(counterexample.is_continue())
}

/// A minimal inconsistent subset of `props`, found by greedy deletion in the
/// given order. Returns an empty vector when `props` is consistent.
pub fn minimal_conflict(props: &[Formula], u: &Universe, limits: &Limits) -> Result<Vec<Formula>> {
    if consistent(props, u, limits)? {
        return Ok(Vec::new());
    }
    let mut core: Vec<Formula> = props.to_vec();
    let mut i = 0;
    while i < core.len() {
        let mut trial = core.clone();
        trial.remove(i);
        if consistent(&trial, u, limits)? {
            i += 1;
        } else {
            core = trial;
        }
    }
    Ok(core)
}
