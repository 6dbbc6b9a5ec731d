use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate sort `{0}`")]
    DuplicateSort(String),
    #[error("duplicate constant `{constant}` in sort `{sort}`")]
    DuplicateConstant { sort: String, constant: String },
    #[error("sort `{0}` has no constants")]
    EmptySort(String),
    #[error("duplicate relation `{0}`")]
    DuplicateRelation(String),
    #[error("relation `{0}` must take at least one argument")]
    ZeroArity(String),
    #[error("`{0}` is a reserved word")]
    ReservedName(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}` expects {expected} arguments, got {found}")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("`{constant}` is not a constant of sort `{sort}`")]
    SortMismatch { sort: String, constant: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("universe has {atoms} ground atoms, exceeding the enumeration bound of {bound}")]
    BoundExceeded { atoms: usize, bound: usize },
    #[error("enumeration bound must be between 1 and {max}, got {found}")]
    InvalidBound { found: usize, max: usize },

    #[error("inconsistent propositions: {}", .conflict.join(", "))]
    Inconsistent { conflict: Vec<String> },
    #[error("step {step}: inconsistent propositions: {}", .conflict.join(", "))]
    InconsistentStep { step: usize, conflict: Vec<String> },
    #[error("formula `{0}` is both added and removed")]
    AddRemoveConflict(String),

    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("empty timeline")]
    EmptyTimeline,

    #[error("world sets range over different universes")]
    UniverseMismatch,
    #[error("empty world set")]
    EmptyWorldSet,
    #[error("sample size must be at least 1")]
    ZeroSample,

    #[error("subset mask {mask:#x} is not contained in a base of {base} worlds")]
    NotASubset { mask: u64, base: usize },
    #[error("base of {found} worlds exceeds the extensional limit of {max}")]
    BaseTooLarge { found: usize, max: usize },
    #[error("empty subset")]
    EmptySubset,
    #[error("not a weak filter")]
    NotAWeakFilter,
    #[error("not a weak ultrafilter")]
    NotAWeakUltrafilter,

    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("correspondence maps `{0}` outside the reader universe")]
    CorrespondenceOutOfRange(String),

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(String),
    #[error("threshold {0} is outside [0, 1]")]
    ThresholdOutOfRange(String),
    #[error("cannot parse `{0}` as a fraction")]
    BadFraction(String),
    #[error("question `{0}` has no designated answers")]
    MissingAnswers(String),
    #[error("no world satisfies the conditioning antecedent")]
    EmptyConditional,
    #[error("empty question set")]
    EmptyQuestions,
    #[error("need at least {needed} reader states, got {found}")]
    TooFewStates { needed: usize, found: usize },
    #[error("no kernel in steps ({from}, {to}]")]
    NoKernelInRange { from: usize, to: usize },
    #[error("step {step} is out of range (timeline has {len} steps)")]
    StepOutOfRange { step: usize, len: usize },
}

impl Error {
    /// True for errors that report a logically inconsistent set of propositions.
    pub fn is_inconsistency(&self) -> bool {
        matches!(
            self,
            Error::Inconsistent { .. } | Error::InconsistentStep { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
