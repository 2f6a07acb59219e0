use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arity mismatch: cannot compose {first:?} with {second:?} (upper, lower)")]
    ArityMismatch {
        first: (usize, usize),
        second: (usize, usize),
    },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("strand or loop reference {0} is out of range")]
    InvalidSite(String),

    #[error("position {position} is not valid here: {reason}")]
    InvalidPosition { position: usize, reason: String },

    #[error("no bend between the decoration and the target leg")]
    NoBend,

    #[error("diagram has ket/bra terminals")]
    TerminalPresent,

    #[error("label `{0}` is not bound in the registry")]
    UnresolvedLabel(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("boundary index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("boundary index {0} listed twice")]
    DuplicateIndex(usize),

    #[error("problem too large: {entries} dense entries exceed the limit of {limit}")]
    ProblemTooLarge { entries: u128, limit: u128 },

    #[error("registry entry `{label}` violates its {property} flag")]
    RegistryFlag { label: String, property: &'static str },

    #[error("malformed registry: {0}")]
    Registry(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("`{0}` is not available at dimension {1}")]
    Unsupported(String, usize),
}
