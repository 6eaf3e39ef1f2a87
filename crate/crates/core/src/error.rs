use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("element has {found} coordinates, group signature expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("size mismatch: |A| = {a}, |B| = {b}")]
    SizeMismatch { a: usize, b: usize },
    #[error("duplicate element {0} in subset")]
    DuplicateElement(String),
    #[error("subsets must be non-empty")]
    EmptySet,
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("zero element where a nonzero one is required")]
    ZeroElement,
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {0} is not irreducible")]
    Reducible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cannot merge partial results: {0}")]
    MixedManifest(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
