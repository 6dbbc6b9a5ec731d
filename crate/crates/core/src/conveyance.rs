//! Narrator-to-reader conveyance.
//!
//! The narrator's world is compressed into a fabula (`compress_phi`), carried
//! over a channel (`transmit_d`), and expanded back into the reader's set of
//! candidate worlds (`reconstruct_psi`). `accuracy_report` compares the
//! reader's decided beliefs against the narrator's world atom by atom, which is
//! the direct path the mediated one should agree with. `evolve` repeats this
//! across a timeline, with fabula edits as the transitions on both sides.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{Atom, Formula, Limits, Literal, RelationSig, Universe, World};
use crate::models::{enumerate_models, WorldSet};
use crate::plausibility::{decided_literals, WeakFilter};
use crate::scalar::Rational;
use crate::story::{apply_transition, delta, Delta, Fabula, Timeline, TransitionEdit};

/// How a channel distorts what passes through it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChannelKind {
    Identity,
    /// Listed formulas never arrive.
    Drop(Vec<Formula>),
    /// Relation names are rewritten.
    Rename(BTreeMap<String, String>),
    /// Listed formulas arrive negated.
    Corrupt(Vec<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub kind: ChannelKind,
    /// Reserved for stochastic channels.
    pub seed: u64,
}

impl Channel {
    pub fn identity() -> Self {
        Channel {
            kind: ChannelKind::Identity,
            seed: 0,
        }
    }

    pub fn drop(formulas: impl IntoIterator<Item = Formula>) -> Self {
        Channel {
            kind: ChannelKind::Drop(formulas.into_iter().collect()),
            seed: 0,
        }
    }

    pub fn corrupt(formulas: impl IntoIterator<Item = Formula>) -> Self {
        Channel {
            kind: ChannelKind::Corrupt(formulas.into_iter().collect()),
            seed: 0,
        }
    }

    pub fn rename<K: Into<String>, V: Into<String>>(map: impl IntoIterator<Item = (K, V)>) -> Self {
        Channel {
            kind: ChannelKind::Rename(map.into_iter().map(|(k, v)| (k.into(), v.into())).collect()),
            seed: 0,
        }
    }

    /// Relation correspondence from narrator to reader names.
    pub fn correspondence(&self) -> BTreeMap<String, String> {
        match &self.kind {
            ChannelKind::Rename(map) => map.clone(),
            _ => BTreeMap::new(),
        }
    }

    /// The universe the reader ends up with: the narrator's, with relations
    /// renamed when the channel renames.
    pub fn reader_universe(&self, narrator: &Arc<Universe>) -> Result<Arc<Universe>> {
        let ChannelKind::Rename(map) = &self.kind else {
            return Ok(narrator.clone());
        };
        let mut targets = BTreeSet::new();
        for (from, to) in map {
            if narrator.relation(from).is_none() {
                return Err(Error::InvalidChannel(format!("rename of unknown relation `{from}`")));
            }
            if !targets.insert(to.as_str()) {
                return Err(Error::InvalidChannel(format!("rename is not injective at `{to}`")));
            }
        }
        let relations = narrator
            .relations()
            .iter()
            .map(|r| RelationSig {
                name: map.get(&r.name).cloned().unwrap_or_else(|| r.name.clone()),
                arg_sorts: r.arg_sorts.clone(),
            })
            .collect();
        Universe::new(narrator.sorts().to_vec(), relations)
            .map(Arc::new)
            .map_err(|e| Error::InvalidChannel(e.to_string()))
    }

    /// Carries one formula across; `None` when it is dropped.
    fn carry(&self, f: &Formula) -> Option<Formula> {
        let listed = |list: &[Formula]| {
            let key = f.to_string();
            list.iter().any(|x| x.to_string() == key)
        };
        match &self.kind {
            ChannelKind::Identity => Some(f.clone()),
            ChannelKind::Drop(list) => (!listed(list)).then(|| f.clone()),
            ChannelKind::Corrupt(list) => Some(if listed(list) {
                f.clone().negate()
            } else {
                f.clone()
            }),
            ChannelKind::Rename(map) => Some(rename_formula(f, map)),
        }
    }

    fn listed(&self) -> &[Formula] {
        match &self.kind {
            ChannelKind::Drop(list) | ChannelKind::Corrupt(list) => list,
            _ => &[],
        }
    }
}

fn rename_formula(f: &Formula, map: &BTreeMap<String, String>) -> Formula {
    match f {
        Formula::Atom(a) => Formula::Atom(Atom {
            relation: map.get(&a.relation).cloned().unwrap_or_else(|| a.relation.clone()),
            args: a.args.clone(),
        }),
        Formula::Not(inner) => rename_formula(inner, map).negate(),
        Formula::And(parts) => Formula::And(parts.iter().map(|p| rename_formula(p, map)).collect()),
        Formula::Or(parts) => Formula::Or(parts.iter().map(|p| rename_formula(p, map)).collect()),
        Formula::Implies(l, r) => Formula::implies(rename_formula(l, map), rename_formula(r, map)),
    }
}

/// `φ`: the literals of `w` whose atoms pass `importance`.
pub fn compress_phi(w: &World, importance: impl Fn(&Atom) -> bool) -> Fabula {
    let u = w.universe();
    Fabula::unchecked(
        w.literals()
            .filter(|l| importance(u.atom(l.atom)))
            .map(|l| (l.to_formula(u), true)),
    )
}

/// A channel's output and any notes about listed formulas it never saw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub fabula: Fabula,
    pub warnings: Vec<String>,
}

/// `d`: carries a fabula across `c` into the reader's universe.
pub fn transmit_d(
    f: &Fabula,
    c: &Channel,
    reader: &Universe,
    limits: &Limits,
) -> Result<Transmission> {
    let warnings = c
        .listed()
        .iter()
        .filter(|x| !f.contains(x))
        .map(|x| format!("channel lists `{x}`, which the fabula does not contain"))
        .collect();
    let carried = f
        .propositions()
        .filter_map(|p| c.carry(&p.formula).map(|g| (g, p.important)));
    let fabula = Fabula::with_flags(carried, reader, limits)?;
    Ok(Transmission { fabula, warnings })
}

/// The reader's position at one time step.
#[derive(Debug, Clone)]
pub struct ReaderState {
    /// `F_R(t)`
    pub fabula: Fabula,
    /// `𝐒_R(t)`
    pub worlds: WorldSet,
    /// Principal filter generated by the whole world set.
    pub filter: WeakFilter,
    /// Ground literals decided by every world.
    pub beliefs: BTreeSet<Literal>,
    /// Edit that produced this fabula from the previous one.
    pub delta: Delta,
}

/// `ψ`: expands a fabula into the reader's candidate worlds.
pub fn reconstruct_psi(f: &Fabula, u: &Arc<Universe>, limits: &Limits) -> Result<ReaderState> {
    f.validate(u, limits)?;
    let worlds = enumerate_models(f, u, limits)?;
    let filter = WeakFilter::minimal(worlds.clone())?;
    let beliefs = decided_literals(&worlds);
    Ok(ReaderState {
        fabula: f.clone(),
        worlds,
        filter,
        beliefs,
        delta: delta(&Fabula::empty(), f),
    })
}

/// Atom-by-atom agreement between a narrator world and a reader's beliefs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConveyanceReport {
    pub matched: usize,
    pub mismatched: usize,
    pub undetermined: usize,
    /// `matched / (matched + mismatched)`; `None` when the reader decides nothing.
    pub accuracy: Option<Rational>,
    pub mismatching_atoms: Vec<String>,
    pub undetermined_atoms: Vec<String>,
    pub commutes: bool,
}

/// Compares `s_n` with the reader's beliefs through a relation correspondence
/// (unmapped relations keep their names).
pub fn accuracy_report(
    s_n: &World,
    reader: &ReaderState,
    correspondence: &BTreeMap<String, String>,
) -> Result<ConveyanceReport> {
    let narrator = s_n.universe();
    let reader_u = reader.worlds.universe();
    let mut report = ConveyanceReport {
        matched: 0,
        mismatched: 0,
        undetermined: 0,
        accuracy: None,
        mismatching_atoms: Vec::new(),
        undetermined_atoms: Vec::new(),
        commutes: true,
    };
    for (i, atom) in narrator.atoms().iter().enumerate() {
        let mapped = Atom {
            relation: correspondence
                .get(&atom.relation)
                .cloned()
                .unwrap_or_else(|| atom.relation.clone()),
            args: atom.args.clone(),
        };
        let j = reader_u
            .atom_index(&mapped)
            .ok_or_else(|| Error::CorrespondenceOutOfRange(atom.to_string()))?;
        let truth = s_n.value(i);
        if reader.beliefs.contains(&Literal::new(j, truth)) {
            report.matched += 1;
        } else if reader.beliefs.contains(&Literal::new(j, !truth)) {
            report.mismatched += 1;
            report.mismatching_atoms.push(atom.to_string());
        } else {
            report.undetermined += 1;
            report.undetermined_atoms.push(atom.to_string());
        }
    }
    let decided = report.matched + report.mismatched;
    report.accuracy = (decided > 0).then(|| Rational::new(report.matched as u64, decided as u64));
    report.commutes = report.mismatched == 0;
    Ok(report)
}

/// Reader states over a timeline, plus channel notes.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub states: Vec<ReaderState>,
    pub warnings: Vec<String>,
}

/// Runs the timeline through a channel one step at a time.
///
/// Each narrator delta is carried across the channel and applied to the
/// reader's accumulated fabula, then the reader's worlds are re-enumerated.
/// Removals of formulas the reader never received are ignored.
pub fn evolve(timeline: &Timeline, c: &Channel, limits: &Limits) -> Result<Evolution> {
    let reader_u = c.reader_universe(timeline.universe())?;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut reader_f = Fabula::empty();
    let mut states = Vec::with_capacity(timeline.len());

    for (step, d) in timeline.deltas().into_iter().enumerate() {
        for f in d.additions.iter().chain(&d.removals) {
            seen.insert(f.to_string());
        }
        let additions: Vec<Formula> = d.additions.iter().filter_map(|f| c.carry(f)).collect();
        let removals: Vec<Formula> = d
            .removals
            .iter()
            .filter_map(|f| c.carry(f))
            .filter(|f| reader_f.contains(f))
            .collect();
        let edit = TransitionEdit::new(additions, removals).map_err(|e| {
            Error::InconsistentStep {
                step,
                conflict: vec![e.to_string()],
            }
        })?;
        let next = apply_transition(&reader_f, &edit, &reader_u, limits).map_err(|e| match e {
            Error::Inconsistent { conflict } => Error::InconsistentStep { step, conflict },
            other => other,
        })?;
        let mut state = reconstruct_psi(&next, &reader_u, limits)?;
        state.delta = delta(&reader_f, &next);
        reader_f = next;
        states.push(state);
    }

    let warnings = c
        .listed()
        .iter()
        .filter(|f| !seen.contains(&f.to_string()))
        .map(|f| format!("channel lists `{f}`, which never occurs in the timeline"))
        .collect();
    Ok(Evolution { states, warnings })
}
