//! Entropy, relevance, coherence and kernel metrics over world sets.
//!
//! Proportions use the counting measure over enumerated worlds and stay exact
//! until an entropy is taken.

mod entropy;
mod etc;
mod kernels;
mod lattice;
mod questions;

pub use entropy::{binary_entropy, entropy_of};
pub use etc::{etc_metric, pullback, Etc, EtcQuestions, DEFAULT_QUESTION_CAP};
pub use kernels::{
    changed_fraction, classify_satellites, detect_kernels, detect_kernels_in, KernelReport,
    SatelliteScore, StepKernel,
};
pub use lattice::{boolean_lattice, BooleanLattice};
pub use questions::{ewc, relevance, Ewc, Question, QuestionScore, Relevance};
