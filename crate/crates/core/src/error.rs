use thiserror::Error;

/// Errors raised by the machine algebra.
///
/// Cap-related failures (`SizeCap`, `CapExceeded`) are kept apart from
/// negative verdicts so callers can tell "too big to decide" from "no".
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    InvalidAlphabet(usize),

    #[error("an automaton needs at least one state")]
    NoStates,

    #[error("window length must be at least 1")]
    EmptyWindow,

    #[error("{what} of size {size} exceeds the cap of {cap}")]
    SizeCap { what: &'static str, size: u128, cap: u128 },

    #[error("{what} exceeded the cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },

    #[error("table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },

    #[error("transition ({state}, {letter}) targets {target}, but there are only {states} states")]
    TargetOutOfRange { state: usize, letter: usize, target: usize, states: usize },

    #[error("letter {letter} is outside the alphabet of size {n}")]
    LetterOutOfRange { letter: usize, n: usize },

    #[error("partition covers {found} states, automaton has {expected}")]
    PartitionMismatch { expected: usize, found: usize },

    #[error("partition is not normalized: {0}")]
    MalformedPartition(String),

    #[error("partition is not a folding")]
    NotFolding,

    #[error("automaton is not strongly synchronizing")]
    NotSynchronizing,

    #[error("automaton is not core")]
    NotCore,

    #[error("word of length {len} is shorter than the synchronizing level {level}")]
    WordTooShort { len: usize, level: usize },

    #[error("word must be nonempty")]
    EmptyWord,

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("state {state} does not permute the alphabet")]
    NotInvertible { state: usize },

    #[error("transducer is not an element of H_n")]
    NotInHn,

    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("invalid digraph automorphism: {0}")]
    InvalidAutomorphism(String),

    #[error("automorphism moves vertex {0}")]
    MovesVertex(usize),

    #[error("operation needs more than one state")]
    SingleState,

    #[error("output rows of states {p} and {q} coincide")]
    EqualOutputRows { p: usize, q: usize },

    #[error("forced state depends on the chosen state word: {0}")]
    ChoiceDependent(String),

    #[error("forced-state sequence is not periodic: {0}")]
    NotPeriodic(String),

    #[error("construction is not well defined: {0}")]
    IllDefined(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for the errors that mean "a configured cap was hit".
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::SizeCap { .. } | Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
