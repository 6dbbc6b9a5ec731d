use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::logic::{Limits, Universe};

use super::fabula::{delta, Delta, Fabula};

/// A universe plus the fabula at each time step `F(0..=T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeline {
    universe: Arc<Universe>,
    steps: Vec<Fabula>,
}

impl Timeline {
    pub fn new(universe: Arc<Universe>, steps: Vec<Fabula>, limits: &Limits) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::EmptyTimeline);
        }
        for (step, f) in steps.iter().enumerate() {
            f.validate(&universe, limits).map_err(|e| match e {
                Error::Inconsistent { conflict } => Error::InconsistentStep { step, conflict },
                other => other,
            })?;
        }
        Ok(Timeline { universe, steps })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn steps(&self) -> &[Fabula] {
        &self.steps
    }

    pub fn step(&self, t: usize) -> Result<&Fabula> {
        self.steps.get(t).ok_or(Error::StepOutOfRange {
            step: t,
            len: self.steps.len(),
        })
    }

    /// Number of steps, `T + 1`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `ρ_t` for every step; step 0 is measured against the empty fabula.
    pub fn deltas(&self) -> Vec<Delta> {
        let empty = Fabula::empty();
        let mut prev = &empty;
        self.steps
            .iter()
            .map(|next| {
                let d = delta(prev, next);
                prev = next;
                d
            })
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].is_subset(&w[1]))
    }
}

/// Renders a timeline in the story-file format. Each block lists the step's
/// removals, then its additions, each in canonical order.
pub fn serialize_story(timeline: &Timeline) -> String {
    let mut out = String::new();
    let u = timeline.universe();
    for sort in u.sorts() {
        let _ = writeln!(out, "sort {}: {}", sort.name, sort.constants.join(", "));
    }
    for rel in u.relations() {
        let _ = writeln!(out, "rel {}({})", rel.name, rel.arg_sorts.join(", "));
    }
    out.push('\n');
    for (t, d) in timeline.deltas().iter().enumerate() {
        let _ = writeln!(out, "t={t}:");
        for r in &d.removals {
            let _ = writeln!(out, "- {r}");
        }
        for a in &d.additions {
            let _ = writeln!(out, "+ {a}");
        }
    }
    out
}
