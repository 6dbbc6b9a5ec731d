use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{consistent, minimal_conflict, Formula, Limits, Universe};

/// A formula asserted by a fabula, with its importance flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Proposition {
    pub formula: Formula,
    pub important: bool,
}

/// A consistent set of propositions about a story world.
///
/// Propositions are kept in canonical order: lexicographic over their
/// rendered form. Duplicates collapse; a duplicate that is important makes the
/// surviving entry important.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fabula {
    props: BTreeMap<String, Proposition>,
}

impl Fabula {
    pub fn empty() -> Self {
        Fabula::default()
    }

    /// Builds a fabula of important propositions, checking well-formedness and
    /// consistency over `u`.
    pub fn new(
        formulas: impl IntoIterator<Item = Formula>,
        u: &Universe,
        limits: &Limits,
    ) -> Result<Self> {
        Self::with_flags(formulas.into_iter().map(|f| (f, true)), u, limits)
    }

    pub fn with_flags(
        entries: impl IntoIterator<Item = (Formula, bool)>,
        u: &Universe,
        limits: &Limits,
    ) -> Result<Self> {
        let fabula = Self::unchecked(entries);
        fabula.validate(u, limits)?;
        Ok(fabula)
    }

    pub(crate) fn unchecked(entries: impl IntoIterator<Item = (Formula, bool)>) -> Self {
        let mut fabula = Fabula::default();
        for (formula, important) in entries {
            fabula.insert(formula, important);
        }
        fabula
    }

    pub(crate) fn insert(&mut self, formula: Formula, important: bool) {
        let formula = formula.canonical();
        self.props
            .entry(formula.to_string())
            .and_modify(|p| p.important |= important)
            .or_insert(Proposition { formula, important });
    }

    pub(crate) fn remove(&mut self, formula: &Formula) -> bool {
        self.props.remove(&formula.to_string()).is_some()
    }

    /// Checks every formula against `u` and the set for consistency.
    pub fn validate(&self, u: &Universe, limits: &Limits) -> Result<()> {
        for f in self.formulas() {
            f.check(u)?;
        }
        if !consistent(self.formulas(), u, limits)? {
            let all: Vec<Formula> = self.formulas().cloned().collect();
            let conflict = minimal_conflict(&all, u, limits)?;
            return Err(Error::Inconsistent {
                conflict: conflict.iter().map(ToString::to_string).collect(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn contains(&self, formula: &Formula) -> bool {
        self.props.contains_key(&formula.to_string())
    }

    pub fn propositions(&self) -> impl Iterator<Item = &Proposition> {
        self.props.values()
    }

    /// Formulas in canonical order.
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.props.values().map(|p| &p.formula)
    }

    pub fn important(&self) -> impl Iterator<Item = &Formula> {
        self.props.values().filter(|p| p.important).map(|p| &p.formula)
    }

    pub fn is_subset(&self, other: &Fabula) -> bool {
        self.props.keys().all(|k| other.props.contains_key(k))
    }
}

/// Changes between two fabulas: `next ∖ prev` and `prev ∖ next`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Delta {
    pub additions: Vec<Formula>,
    pub removals: Vec<Formula>,
}

impl Delta {
    pub fn is_expansion(&self) -> bool {
        self.removals.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty() && self.removals.is_empty()
    }
}

/// Set differences between consecutive fabulas, in canonical order.
pub fn delta(prev: &Fabula, next: &Fabula) -> Delta {
    let diff = |a: &Fabula, b: &Fabula| {
        a.props
            .iter()
            .filter(|(k, _)| !b.props.contains_key(*k))
            .map(|(_, p)| p.formula.clone())
            .collect()
    };
    Delta {
        additions: diff(next, prev),
        removals: diff(prev, next),
    }
}

/// A fabula edit: formulas to remove, then formulas to add.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitionEdit {
    additions: BTreeMap<String, Formula>,
    removals: BTreeMap<String, Formula>,
}

impl TransitionEdit {
    pub fn new(
        additions: impl IntoIterator<Item = Formula>,
        removals: impl IntoIterator<Item = Formula>,
    ) -> Result<Self> {
        let keyed = |fs: &mut dyn Iterator<Item = Formula>| -> BTreeMap<String, Formula> {
            fs.map(|f| (f.to_string(), f)).collect()
        };
        let additions = keyed(&mut additions.into_iter());
        let removals = keyed(&mut removals.into_iter());
        if let Some(k) = additions.keys().find(|k| removals.contains_key(*k)) {
            return Err(Error::AddRemoveConflict(k.clone()));
        }
        Ok(TransitionEdit {
            additions,
            removals,
        })
    }

    pub fn additions(&self) -> impl Iterator<Item = &Formula> {
        self.additions.values()
    }

    pub fn removals(&self) -> impl Iterator<Item = &Formula> {
        self.removals.values()
    }
}

impl From<&Delta> for TransitionEdit {
    fn from(d: &Delta) -> Self {
        TransitionEdit::new(d.additions.iter().cloned(), d.removals.iter().cloned())
            .expect("a delta never adds and removes the same formula")
    }
}

/// `(f ∖ removals) ∪ additions`, rejected if the result is inconsistent.
/// Added propositions are important; surviving ones keep their flag.
pub fn apply_transition(
    f: &Fabula,
    z: &TransitionEdit,
    u: &Universe,
    limits: &Limits,
) -> Result<Fabula> {
    let mut next = f.clone();
    for r in z.removals() {
        next.remove(r);
    }
    for a in z.additions() {
        next.insert(a.clone(), true);
    }
    next.validate(u, limits)?;
    Ok(next)
}
