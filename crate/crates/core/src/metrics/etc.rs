use std::collections::BTreeSet;

use serde::Serialize;

use crate::conveyance::ReaderState;
use crate::error::{Error, Result};
use crate::logic::{Literal, World};
use crate::models::{same_universe, truth_proportion, WorldSet};
use crate::plausibility::decided_literals;
use crate::scalar::Rational;

use super::kernels::KernelReport;
use super::questions::Question;

/// Default cap on derived question sets.
pub const DEFAULT_QUESTION_CAP: usize = 64;

/// Where ETC's questions come from.
#[derive(Debug, Clone, Copy)]
pub enum EtcQuestions<'a> {
    Explicit(&'a [Question]),
    /// Pair beliefs held just before the first kernel in range with beliefs
    /// gained at it.
    Derive {
        states: &'a [ReaderState],
        cap: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Etc {
    pub then: usize,
    pub now: usize,
    /// The kernel the derived questions straddle.
    pub kernel: Option<usize>,
    pub value: Rational,
    /// Literals of the present truth that the earlier sample already decides.
    pub pullback: Vec<String>,
    pub questions: Vec<String>,
}

/// Literals of `truth` that every world of `sample` agrees on.
pub fn pullback(sample: &WorldSet, truth: &World) -> Result<BTreeSet<Literal>> {
    if !same_universe(sample.universe(), truth.universe()) {
        return Err(Error::UniverseMismatch);
    }
    let theory = truth.theory();
    Ok(decided_literals(sample)
        .into_iter()
        .filter(|l| theory.contains(l))
        .collect())
}

/// Mean truth proportion, over the sample taken at `then`, of questions that
/// cross a kernel on the way to `now`.
pub fn etc_metric(
    sample_then: &WorldSet,
    truth_now: &World,
    kernels: &KernelReport,
    (then, now): (usize, usize),
    questions: EtcQuestions<'_>,
) -> Result<Etc> {
    if sample_then.is_empty() {
        return Err(Error::EmptyWorldSet);
    }
    let w_prime = pullback(sample_then, truth_now)?;
    let u = sample_then.universe();

    let (kernel, qs) = match questions {
        EtcQuestions::Explicit(qs) => (None, qs.to_vec()),
        EtcQuestions::Derive { states, cap } => {
            let k = (then + 1..=now)
                .find(|&t| kernels.is_kernel(t))
                .ok_or(Error::NoKernelInRange { from: then, to: now })?;
            if k >= states.len() {
                return Err(Error::StepOutOfRange {
                    step: k,
                    len: states.len(),
                });
            }
            let contradicts = |l: &Literal| w_prime.contains(&l.complement());
            let before = &states[k - 1].beliefs;
            let gained: Vec<&Literal> = states[k]
                .beliefs
                .iter()
                .filter(|l| !before.contains(l) && !contradicts(l))
                .collect();
            let mut qs = Vec::new();
            'outer: for a in before.iter().filter(|l| !contradicts(l)) {
                for b in &gained {
                    if qs.len() == cap {
                        break 'outer;
                    }
                    qs.push(Question::new(a.to_formula(u), b.to_formula(u)).with_answers(true, true));
                }
            }
            (Some(k), qs)
        }
    };
    if qs.is_empty() {
        return Err(Error::EmptyQuestions);
    }

    let mut total = Rational::from_integer(0);
    for q in &qs {
        total += truth_proportion(sample_then, &q.implication())?;
    }
    Ok(Etc {
        then,
        now,
        kernel,
        value: total / qs.len() as u64,
        pullback: w_prime.iter().map(|l| l.render(u)).collect(),
        questions: qs.iter().map(|q| q.implication().to_string()).collect(),
    })
}
