use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("operands live on different groups")]
    GroupMismatch,

    #[error("{what} index {index} out of range (size {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("character table construction failed: {0}")]
    CharacterTable(String),

    #[error("time must be non-negative and finite, got {0}")]
    InvalidTime(f64),

    #[error("character sum left an imaginary residual of {0:e}")]
    ImaginaryResidual(f64),

    #[error("invalid jump measure: {0}")]
    InvalidJumpMeasure(String),

    #[error("malformed map: {0}")]
    InvalidMap(String),

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("disconnected: {0}")]
    Disconnected(String),

    #[error("broken edge word: {0}")]
    BrokenWord(String),

    #[error("invalid areas: {0}")]
    InvalidArea(String),

    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),

    #[error("arity too small: {0}")]
    Arity(String),

    #[error("brute-force cap exceeded: {needed} evaluations requested, cap is {cap}")]
    CapExceeded { needed: f64, cap: f64 },

    #[error("non-orientable computation requires an inversion-invariant jump measure")]
    InversionRequired,

    #[error("jump measure is not admissible: {0}")]
    NotAdmissible(String),

    #[error("functional is not invariant under simultaneous conjugation: {0}")]
    NotInvariant(String),

    #[error("rejection sampler accepted nothing after {attempts} attempts")]
    AcceptanceTooLow { attempts: u64 },

    #[error("refinement data inconsistent: {0}")]
    InvalidRefinement(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
