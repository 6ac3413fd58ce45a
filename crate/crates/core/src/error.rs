use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("two of the three reference points coincide")]
    DegenerateTriple,
    #[error("cross-ratio is indeterminate (0:0)")]
    Indeterminate,
    #[error("section {0} is zero")]
    ZeroSection(usize),
    #[error("anchor pair ({0}, {1}) is degenerate")]
    DegeneratePair(usize, usize),
    #[error("section {0} lies on an anchor or is zero")]
    DegenerateAnchor(usize),
    #[error("{what} exceeds bound {bound}")]
    TooLarge { what: String, bound: u64 },
    #[error("weight lies outside the cone of the projection")]
    OutsideCone,
    #[error("weight is the apex of the projection cone")]
    Apex,
    #[error("epsilon {0} does not give a generic weight")]
    BadEpsilon(String),
    #[error("limit equations fail for the given charts")]
    EquationsFail,
    #[error("input is not stable: {0}")]
    UnstableInput(String),
    #[error("inconsistent family: condition {condition} fails ({detail})")]
    InconsistentFamily { condition: String, detail: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
