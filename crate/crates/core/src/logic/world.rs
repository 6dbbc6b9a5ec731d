use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::formula::Formula;
use super::universe::Universe;
use crate::error::{Error, Result};

/// Largest number of ground atoms a [`World`] can carry.
pub const MAX_WORLD_ATOMS: usize = 63;

/// A ground literal: an atom index and the truth value it asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    pub atom: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(atom: usize, positive: bool) -> Self {
        Literal { atom, positive }
    }

    pub fn complement(self) -> Self {
        Literal {
            atom: self.atom,
            positive: !self.positive,
        }
    }

    pub fn to_formula(self, u: &Universe) -> Formula {
        let atom = Formula::Atom(u.atom(self.atom).clone());
        if self.positive {
            atom
        } else {
            atom.negate()
        }
    }

    pub fn render(self, u: &Universe) -> String {
        self.to_formula(u).to_string()
    }

    /// Recognises `a` and `!a` for ground atoms `a` of `u`.
    pub fn from_formula(f: &Formula, u: &Universe) -> Option<Self> {
        match f {
            Formula::Atom(a) => u.atom_index(a).map(|i| Literal::new(i, true)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => u.atom_index(a).map(|i| Literal::new(i, false)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn holds_in(self, bits: u64) -> bool {
        (bits >> self.atom & 1 == 1) == self.positive
    }
}

/// Every ground literal over `u`, ordered by atom then polarity.
pub fn all_literals(u: &Universe) -> Vec<Literal> {
    (0..u.atom_count())
        .flat_map(|i| [Literal::new(i, false), Literal::new(i, true)])
        .collect()
}

/// A complete truth assignment over a universe's ground atoms. Bit `i` holds
/// the value of atom `i` in canonical order.
#[derive(Clone, PartialEq, Eq)]
pub struct World {
    universe: Arc<Universe>,
    bits: u64,
}

impl World {
    pub fn new(universe: Arc<Universe>, bits: u64) -> Result<Self> {
        let n = universe.atom_count();
        if n > MAX_WORLD_ATOMS {
            return Err(Error::BoundExceeded {
                atoms: n,
                bound: MAX_WORLD_ATOMS,
            });
        }
        if bits >> n != 0 {
            return Err(Error::UnknownAtom(format!("bit {}", 63 - bits.leading_zeros())));
        }
        Ok(World { universe, bits })
    }

    /// Builds the world where exactly the listed atoms are true.
    pub fn from_true_atoms<'a>(
        universe: Arc<Universe>,
        atoms: impl IntoIterator<Item = &'a super::Atom>,
    ) -> Result<Self> {
        let mut bits = 0u64;
        for a in atoms {
            bits |= 1 << universe.resolve(a)?;
        }
        World::new(universe, bits)
    }

    pub(crate) fn from_parts(universe: Arc<Universe>, bits: u64) -> Self {
        World { universe, bits }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn value(&self, atom: usize) -> bool {
        self.bits >> atom & 1 == 1
    }

    /// The ground theory: one literal per atom.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        (0..self.universe.atom_count()).map(|i| Literal::new(i, self.value(i)))
    }

    pub fn theory(&self) -> BTreeSet<Literal> {
        self.literals().collect()
    }

    pub fn evaluate(&self, f: &Formula) -> Result<bool> {
        Ok(f.compile(&self.universe)?.eval(self.bits))
    }
}

impl fmt::Debug for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "World({:#b})", self.bits)
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<String> = self.literals().map(|l| l.render(&self.universe)).collect();
        write!(f, "{{{}}}", lits.join(", "))
    }
}

/// Truth of `f` in `w`.
pub fn evaluate(w: &World, f: &Formula) -> Result<bool> {
    w.evaluate(f)
}
