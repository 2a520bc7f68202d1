use crate::scalar::Domain;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain mismatch: expected {expected}, got {found}")]
    DomainMismatch { expected: String, found: String },

    #[error("matrix is not over a field: {0:?}")]
    NotAField(Domain),

    #[error("unsupported domain for this operation: {0:?}")]
    UnsupportedDomain(Domain),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("associativity failure at basis triple ({0}, {1}, {2})")]
    Associativity(usize, usize, usize),

    #[error("unit law failure at basis element {0}")]
    UnitLaw(usize),

    #[error("bimodule axiom failure: {0}")]
    BimoduleAxiom(String),

    #[error("hypothesis violation: bimodule is not projective as a {side} module")]
    HypothesisViolation { side: &'static str },

    #[error("not a triangular ring: {0}")]
    NotTriangular(String),

    #[error("invalid module data: {0}")]
    InvalidModule(String),

    #[error("morphism is not equivariant: {0}")]
    NotEquivariant(String),

    #[error("sequence is not exact: {0}")]
    NotExact(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("element is a {0}")]
    BadQuotientElement(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resolution indeterminate above cap {0}")]
    Indeterminate(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("radical computation failed: {0}")]
    Radical(String),

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
