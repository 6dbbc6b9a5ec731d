//! The `analyze` pipeline and its report.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;
use storyworld::conveyance::{
    accuracy_report, compress_phi, evolve, reconstruct_psi, transmit_d, ConveyanceReport, ReaderState,
};
use storyworld::metrics::{
    classify_satellites, detect_kernels, etc_metric, ewc, EtcQuestions, KernelReport, Question,
    QuestionScore, DEFAULT_QUESTION_CAP,
};
use storyworld::models::{agreement_check, enumerate_models, intersect, sample_worlds, WorldSet};
use storyworld::plausibility::{decided_literals, extend_to_ultrafilter, ultraproduct};
use storyworld::{Atom, Error, Formula, Rational, Timeline, Universe, World};

use crate::config::RunConfig;
use crate::selectors::{parse_channel, select_truth};
use crate::CliError;

/// An exact rational with its decimal rendering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
    pub value: f64,
}

impl From<Rational> for Fraction {
    fn from(r: Rational) -> Self {
        Fraction {
            num: *r.numer(),
            den: *r.denom(),
            value: *r.numer() as f64 / *r.denom() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub channel: String,
    pub truth: String,
    pub sample_k: usize,
    pub seed: u64,
    pub theta: Fraction,
    pub epsilon: f64,
    pub bound: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EwcReport {
    pub value: Fraction,
    pub mean_entropy: f64,
    pub questions: Vec<QuestionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionReport {
    pub question: String,
    pub proportion: Fraction,
    pub entropy: f64,
    pub relevance: Option<f64>,
}

impl From<&QuestionScore> for QuestionReport {
    fn from(q: &QuestionScore) -> Self {
        QuestionReport {
            question: q.question.clone(),
            proportion: q.proportion.into(),
            entropy: q.entropy,
            relevance: q.relevance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UltraproductReport {
    pub true_atoms: Vec<String>,
    pub in_worlds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub worlds: usize,
    pub beliefs: usize,
    pub fabula: usize,
    pub additions: Vec<String>,
    pub removals: Vec<String>,
    pub changed_fraction: Fraction,
    pub kernel: bool,
    pub sample_size: usize,
    pub ewc: Option<EwcReport>,
    pub ultraproduct: UltraproductReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Accuracy {
    pub accuracy: Option<Fraction>,
    pub matched: usize,
    pub mismatched: usize,
    pub undetermined: usize,
    pub mismatching_atoms: Vec<String>,
    pub undetermined_atoms: Vec<String>,
    pub commutes: bool,
}

impl From<ConveyanceReport> for Accuracy {
    fn from(r: ConveyanceReport) -> Self {
        Accuracy {
            accuracy: r.accuracy.map(Fraction::from),
            matched: r.matched,
            mismatched: r.mismatched,
            undetermined: r.undetermined,
            mismatching_atoms: r.mismatching_atoms,
            undetermined_atoms: r.undetermined_atoms,
            commutes: r.commutes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conveyance {
    /// The narrator's truth world compressed, sent and reconstructed whole.
    pub direct: Accuracy,
    /// The reader's state after the last step.
    pub final_state: Accuracy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatelliteReport {
    pub step: usize,
    pub mean_relevance: Option<f64>,
    pub questions: usize,
    pub satellite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelEntry {
    pub step: usize,
    pub changed_fraction: Fraction,
    pub satellites: Vec<SatelliteReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtcReport {
    pub then: usize,
    pub now: usize,
    pub value: Option<Fraction>,
    pub pullback: Vec<String>,
    pub questions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub settings: Settings,
    pub atoms: usize,
    pub truth_world: Vec<String>,
    pub steps: Vec<StepReport>,
    pub conveyance: Conveyance,
    pub kernels: Vec<KernelEntry>,
    pub etc: Vec<EtcReport>,
    pub warnings: Vec<String>,
}

/// Moves a narrator world into the reader's universe through a relation
/// correspondence.
fn into_reader(w: &World, reader: &Arc<Universe>, corr: &BTreeMap<String, String>) -> Result<World, Error> {
    let narrator = w.universe();
    let mut bits = 0u64;
    for (i, atom) in narrator.atoms().iter().enumerate() {
        if !w.value(i) {
            continue;
        }
        let mapped = Atom {
            relation: corr.get(&atom.relation).cloned().unwrap_or_else(|| atom.relation.clone()),
            args: atom.args.clone(),
        };
        bits |= 1 << reader.resolve(&mapped)?;
    }
    World::new(reader.clone(), bits)
}

fn true_atoms(w: &World) -> Vec<String> {
    let u = w.universe();
    (0..u.atom_count()).filter(|&i| w.value(i)).map(|i| u.atom(i).to_string()).collect()
}

/// `(known truth literals) -> L` for each truth literal `L` the sample leaves open.
fn step_questions(sample: &WorldSet, truth: &World) -> Vec<Question> {
    let u = truth.universe();
    let decided = decided_literals(sample);
    let decided_atoms: BTreeSet<usize> = decided.iter().map(|l| l.atom).collect();
    let (known, open): (Vec<_>, Vec<_>) = truth
        .literals()
        .filter(|l| decided.contains(l) || !decided_atoms.contains(&l.atom))
        .partition(|l| decided.contains(l));
    let antecedent = match known.as_slice() {
        [one] => one.to_formula(u),
        many => Formula::and(many.iter().map(|l| l.to_formula(u))),
    };
    open.iter()
        .map(|l| Question::new(antecedent.clone(), l.to_formula(u)).with_answers(true, true))
        .collect()
}

fn ewc_report(sample: &WorldSet, truth: &World) -> Result<Option<EwcReport>, Error> {
    let qs = step_questions(sample, truth);
    if qs.is_empty() {
        return Ok(None);
    }
    let e = ewc(sample, &qs)?;
    Ok(Some(EwcReport {
        value: e.value.into(),
        mean_entropy: e.mean_entropy,
        questions: e.questions.iter().map(QuestionReport::from).collect(),
    }))
}

fn ultraproduct_report(state: &ReaderState) -> Result<UltraproductReport, Error> {
    let w = ultraproduct(&extend_to_ultrafilter(&state.filter))?;
    Ok(UltraproductReport {
        in_worlds: state.worlds.contains(&w),
        true_atoms: true_atoms(&w),
    })
}

fn kernel_report(states: &[ReaderState], run: &RunConfig, warnings: &mut Vec<String>) -> Result<KernelReport, Error> {
    if states.len() < 2 {
        warnings.push("single-step timeline: no kernels can be detected".into());
        return Ok(KernelReport {
            theta: run.theta,
            steps: vec![storyworld::metrics::StepKernel {
                step: 0,
                fraction: Rational::from_integer(0),
                kernel: false,
                satellites: Vec::new(),
            }],
        });
    }
    let report = detect_kernels(states, run.theta)?;
    classify_satellites(states, &report, run.epsilon, None, &run.limits)
}

pub fn analyze(timeline: &Timeline, run: &RunConfig) -> Result<AnalysisReport, CliError> {
    let limits = &run.limits;
    let narrator_u = timeline.universe();
    let channel = parse_channel(&run.channel, narrator_u)?;
    let corr = channel.correspondence();
    let evolution = evolve(timeline, &channel, limits)?;
    let states = evolution.states;
    let mut warnings = evolution.warnings;
    let reader_u = states[0].worlds.universe().clone();

    let last = timeline.steps().last().expect("timelines are non-empty");
    let narrator_final = enumerate_models(last, narrator_u, limits)?;
    let truth = narrator_final.get(select_truth(&run.truth, &narrator_final)?).expect("selected index exists");
    let truth_r = into_reader(&truth, &reader_u, &corr)?;

    let sent = transmit_d(&compress_phi(&truth, |_| true), &channel, &reader_u, limits)?;
    warnings.extend(sent.warnings);
    let direct = reconstruct_psi(&sent.fabula, &reader_u, limits)?;
    let conveyance = Conveyance {
        direct: accuracy_report(&truth, &direct, &corr)?.into(),
        final_state: accuracy_report(&truth, states.last().expect("non-empty"), &corr)?.into(),
    };

    let kernels = kernel_report(&states, run, &mut warnings)?;

    let mut samples = Vec::with_capacity(states.len());
    let mut steps = Vec::with_capacity(states.len());
    for (t, state) in states.iter().enumerate() {
        let sample = sample_worlds(&state.worlds, run.sample_k, run.seed.wrapping_add(t as u64))?;
        let ultra = ultraproduct_report(state)?;
        if !ultra.in_worlds {
            warnings.push(format!("step {t}: ultraproduct falls outside the reader's worlds"));
        }
        if t > 0 {
            let shared = intersect(&states[t - 1].worlds, &state.worlds)?;
            if !agreement_check(&shared, &state.delta.additions)? {
                warnings.push(format!(
                    "step {t}: worlds kept from step {} do not all agree on the additions",
                    t - 1
                ));
            }
        }
        steps.push(StepReport {
            step: t,
            worlds: state.worlds.len(),
            beliefs: state.beliefs.len(),
            fabula: state.fabula.len(),
            additions: state.delta.additions.iter().map(|f| f.to_string()).collect(),
            removals: state.delta.removals.iter().map(|f| f.to_string()).collect(),
            changed_fraction: kernels.steps[t].fraction.into(),
            kernel: kernels.steps[t].kernel,
            sample_size: sample.len(),
            ewc: ewc_report(&sample, &truth_r)?,
            ultraproduct: ultra,
        });
        samples.push(sample);
    }

    let mut etc = Vec::new();
    for k in kernels.kernels() {
        let derive = EtcQuestions::Derive {
            states: &states,
            cap: DEFAULT_QUESTION_CAP,
        };
        match etc_metric(&samples[k - 1], &truth_r, &kernels, (k - 1, k), derive) {
            Ok(e) => etc.push(EtcReport {
                then: e.then,
                now: e.now,
                value: Some(e.value.into()),
                pullback: e.pullback,
                questions: e.questions,
            }),
            Err(Error::EmptyQuestions) => {
                warnings.push(format!("kernel {k}: no transitional questions to score"));
                etc.push(EtcReport {
                    then: k - 1,
                    now: k,
                    value: None,
                    pullback: Vec::new(),
                    questions: Vec::new(),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }

    Ok(AnalysisReport {
        settings: Settings {
            channel: run.channel.clone(),
            truth: run.truth.clone(),
            sample_k: run.sample_k,
            seed: run.seed,
            theta: run.theta.into(),
            epsilon: run.epsilon,
            bound: limits.max_atoms(),
        },
        atoms: narrator_u.atom_count(),
        truth_world: true_atoms(&truth),
        steps,
        conveyance,
        kernels: kernels
            .steps
            .iter()
            .filter(|s| s.kernel)
            .map(|s| KernelEntry {
                step: s.step,
                changed_fraction: s.fraction.into(),
                satellites: s
                    .satellites
                    .iter()
                    .map(|x| SatelliteReport {
                        step: x.step,
                        mean_relevance: x.mean_relevance,
                        questions: x.questions,
                        satellite: x.satellite,
                    })
                    .collect(),
            })
            .collect(),
        etc,
        warnings,
    })
}

pub const CSV_COLUMNS: [&str; 14] = [
    "step",
    "worlds",
    "beliefs",
    "fabula",
    "changed_num",
    "changed_den",
    "changed",
    "kernel",
    "sample_size",
    "ewc_num",
    "ewc_den",
    "ewc",
    "ewc_mean_entropy",
    "ultraproduct_in_worlds",
];

pub fn to_csv(report: &AnalysisReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for s in &report.steps {
        let (num, den, value, entropy) = match &s.ewc {
            Some(e) => (
                e.value.num.to_string(),
                e.value.den.to_string(),
                e.value.value.to_string(),
                e.mean_entropy.to_string(),
            ),
            None => Default::default(),
        };
        w.write_record([
            s.step.to_string(),
            s.worlds.to_string(),
            s.beliefs.to_string(),
            s.fabula.to_string(),
            s.changed_fraction.num.to_string(),
            s.changed_fraction.den.to_string(),
            s.changed_fraction.value.to_string(),
            s.kernel.to_string(),
            s.sample_size.to_string(),
            num,
            den,
            value,
            entropy,
            s.ultraproduct.in_worlds.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn to_json(report: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}
