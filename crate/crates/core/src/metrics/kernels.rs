use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::conveyance::ReaderState;
use crate::error::{Error, Result};
use crate::logic::{Limits, Literal};
use crate::models::WorldSet;
use crate::scalar::Rational;
use crate::Bits;

use super::questions::{relevance, Question};

/// A candidate satellite step and how relevant the kernel's questions were
/// under the reader's worlds just before it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatelliteScore {
    pub step: usize,
    /// `None` when no question could be scored.
    pub mean_relevance: Option<Bits>,
    pub questions: usize,
    pub satellite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepKernel {
    pub step: usize,
    /// `|B(t−1) Δ B(t)| / max(1, |B(t−1) ∪ B(t)|)`
    pub fraction: Rational,
    pub kernel: bool,
    /// Filled in by [`classify_satellites`] for kernel steps.
    pub satellites: Vec<SatelliteScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    pub theta: Rational,
    pub steps: Vec<StepKernel>,
}

impl KernelReport {
    pub fn kernels(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().filter(|s| s.kernel).map(|s| s.step)
    }

    pub fn is_kernel(&self, step: usize) -> bool {
        self.steps.get(step).is_some_and(|s| s.kernel)
    }
}

/// Fraction of beliefs that changed between two belief sets.
pub fn changed_fraction(before: &BTreeSet<Literal>, after: &BTreeSet<Literal>) -> Rational {
    let changed = before.symmetric_difference(after).count() as u64;
    let union = before.union(after).count().max(1) as u64;
    Rational::new(changed, union)
}

/// Flags the steps whose belief change fraction exceeds `theta`.
pub fn detect_kernels(states: &[ReaderState], theta: Rational) -> Result<KernelReport> {
    let beliefs: Vec<&BTreeSet<Literal>> = states.iter().map(|s| &s.beliefs).collect();
    detect_kernels_in(&beliefs, theta)
}

/// [`detect_kernels`] over bare belief sets.
pub fn detect_kernels_in(beliefs: &[&BTreeSet<Literal>], theta: Rational) -> Result<KernelReport> {
    if beliefs.len() < 2 {
        return Err(Error::TooFewStates {
            needed: 2,
            found: beliefs.len(),
        });
    }
    if theta > Rational::from_integer(1) {
        return Err(Error::ThresholdOutOfRange(theta.to_string()));
    }
    let mut steps = vec![StepKernel {
        step: 0,
        fraction: Rational::from_integer(0),
        kernel: false,
        satellites: Vec::new(),
    }];
    for (t, pair) in beliefs.windows(2).enumerate() {
        let fraction = changed_fraction(pair[0], pair[1]);
        steps.push(StepKernel {
            step: t + 1,
            fraction,
            kernel: fraction > theta,
            satellites: Vec::new(),
        });
    }
    Ok(KernelReport { theta, steps })
}

/// Literals decided at `step` that were not decided at the step before.
fn new_beliefs(states: &[ReaderState], step: usize) -> BTreeSet<Literal> {
    let before = step.checked_sub(1).map(|p| &states[p].beliefs);
    states[step]
        .beliefs
        .iter()
        .filter(|l| before.is_none_or(|b| !b.contains(l)))
        .copied()
        .collect()
}

/// Default questions linking step `s` to kernel `k`: `a → b` for each literal
/// `a` newly believed at `s` and each literal `b` on another atom believed at
/// `k` but not before `s`, both answered true.
fn derived_questions(states: &[ReaderState], s: usize, k: usize) -> Vec<Question> {
    let u = states[k].worlds.universe();
    let earlier = s.checked_sub(1).map(|p| &states[p].beliefs);
    let revealed: Vec<Literal> = states[k]
        .beliefs
        .iter()
        .filter(|l| earlier.is_none_or(|b| !b.contains(l)))
        .copied()
        .collect();
    let mut out = Vec::new();
    for a in new_beliefs(states, s) {
        for &b in revealed.iter().filter(|b| b.atom != a.atom) {
            out.push(Question::new(a.to_formula(u), b.to_formula(u)).with_answers(true, true));
        }
    }
    out
}

/// Labels each non-kernel step between the previous kernel and kernel `k` as a
/// satellite of `k` when the mean relevance of `k`'s questions, under the
/// reader's worlds just before that step, exceeds `epsilon`.
///
/// `questions` overrides the derived question set per kernel step.
/// Questions whose antecedent holds in no prior world are skipped.
pub fn classify_satellites(
    states: &[ReaderState],
    report: &KernelReport,
    epsilon: Bits,
    questions: Option<&BTreeMap<usize, Vec<Question>>>,
    limits: &Limits,
) -> Result<KernelReport> {
    if states.len() != report.steps.len() {
        return Err(Error::StepOutOfRange {
            step: report.steps.len(),
            len: states.len(),
        });
    }
    let mut out = report.clone();
    let mut previous_kernel: Option<usize> = None;
    for k in report.kernels().collect::<Vec<_>>() {
        let first = previous_kernel.map_or(0, |p| p + 1);
        let mut scores = Vec::new();
        for s in first..k {
            let prior = match s.checked_sub(1) {
                Some(p) => states[p].worlds.clone(),
                None => WorldSet::all(states[s].worlds.universe().clone(), limits)?,
            };
            let qs = match questions.and_then(|m| m.get(&k)) {
                Some(qs) => qs.clone(),
                None => derived_questions(states, s, k),
            };
            let mut total = 0.0;
            let mut scored = 0usize;
            for q in &qs {
                match relevance(q, &prior) {
                    Ok(r) => {
                        total += r.value;
                        scored += 1;
                    }
                    Err(Error::EmptyConditional) => {}
                    Err(e) => return Err(e),
                }
            }
            let mean_relevance = (scored > 0).then(|| total / scored as Bits);
            scores.push(SatelliteScore {
                step: s,
                mean_relevance,
                questions: scored,
                satellite: mean_relevance.is_some_and(|m| m > epsilon),
            });
        }
        out.steps[k].satellites = scores;
        previous_kernel = Some(k);
    }
    Ok(out)
}
