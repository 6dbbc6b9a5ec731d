use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{Formula, World};
use crate::models::{truth_proportion, WorldSet};
use crate::scalar::Rational;
use crate::Bits;

use super::entropy::entropy_of;

/// "If `antecedent` then `consequent`", with optional true answers `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub antecedent: Formula,
    pub consequent: Formula,
    pub answers: Option<(bool, bool)>,
}

impl Question {
    pub fn new(antecedent: Formula, consequent: Formula) -> Self {
        Question {
            antecedent,
            consequent,
            answers: None,
        }
    }

    pub fn with_answers(mut self, a: bool, b: bool) -> Self {
        self.answers = Some((a, b));
        self
    }

    /// Takes the true answers from `truth`.
    pub fn answered_by(mut self, truth: &World) -> Result<Self> {
        let a = truth.evaluate(&self.antecedent)?;
        let b = truth.evaluate(&self.consequent)?;
        self.answers = Some((a, b));
        Ok(self)
    }

    /// `A -> B`
    pub fn implication(&self) -> Formula {
        Formula::implies(self.antecedent.clone(), self.consequent.clone())
    }
}

fn with_value(f: &Formula, value: bool) -> Formula {
    if value {
        f.clone()
    } else {
        f.clone().negate()
    }
}

/// The two entropies behind a relevance score and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Relevance {
    /// Proportion of the prior with `A = a`.
    pub p_antecedent: Rational,
    /// Proportion of `B = b` among those worlds.
    pub p_consequent: Rational,
    pub value: Bits,
}

/// `H(A = a | γ) − H(B = b | A = a, γ)` under the counting measure on `prior`.
pub fn relevance(q: &Question, prior: &WorldSet) -> Result<Relevance> {
    let (a, b) = q
        .answers
        .ok_or_else(|| Error::MissingAnswers(q.implication().to_string()))?;
    relevance_at(q, a, b, prior)
}

fn relevance_at(q: &Question, a: bool, b: bool, prior: &WorldSet) -> Result<Relevance> {
    let antecedent = with_value(&q.antecedent, a);
    let p_antecedent = truth_proportion(prior, &antecedent)?;
    let given = prior.filter(&antecedent)?;
    if given.is_empty() {
        return Err(Error::EmptyConditional);
    }
    let p_consequent = truth_proportion(&given, &with_value(&q.consequent, b))?;
    let value = entropy_of::<Bits>(&p_antecedent)? - entropy_of::<Bits>(&p_consequent)?;
    Ok(Relevance {
        p_antecedent,
        p_consequent,
        value,
    })
}

/// One question's contribution to EWC.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionScore {
    pub question: String,
    /// `P_s′(A → B)`
    pub proportion: Rational,
    /// `H(P_s′(A → B))`
    pub entropy: Bits,
    /// `H(A = T | s′) − H(B = b | A = T, s′)` with `b` from the answers;
    /// `None` for an unanswered question or when `A` holds nowhere in the sample.
    pub relevance: Option<Bits>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ewc {
    /// Mean truth proportion of the question set.
    pub value: Rational,
    /// Mean binary entropy of the same proportions.
    pub mean_entropy: Bits,
    pub questions: Vec<QuestionScore>,
}

/// Mean truth proportion of `A → B` over `sample`, plus the entropy companion.
pub fn ewc(sample: &WorldSet, questions: &[Question]) -> Result<Ewc> {
    if questions.is_empty() {
        return Err(Error::EmptyQuestions);
    }
    if sample.is_empty() {
        return Err(Error::EmptyWorldSet);
    }
    let mut total = Rational::from_integer(0);
    let mut entropy_total = 0.0;
    let mut scores = Vec::with_capacity(questions.len());
    for q in questions {
        let implication = q.implication();
        let proportion = truth_proportion(sample, &implication)?;
        let entropy = entropy_of::<Bits>(&proportion)?;
        let relevance = match q.answers.map(|(_, b)| relevance_at(q, true, b, sample)) {
            Some(Ok(r)) => Some(r.value),
            None | Some(Err(Error::EmptyConditional)) => None,
            Some(Err(e)) => return Err(e),
        };
        total += proportion;
        entropy_total += entropy;
        scores.push(QuestionScore {
            question: implication.to_string(),
            proportion,
            entropy,
            relevance,
        });
    }
    let n = questions.len() as u64;
    Ok(Ewc {
        value: total / n,
        mean_entropy: entropy_total / n as Bits,
        questions: scores,
    })
}
