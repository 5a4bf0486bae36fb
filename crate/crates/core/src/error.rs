use thiserror::Error;

use crate::complex::{format_violations, Violation};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid category parameters: {0}")]
    InvalidParams(String),

    #[error("cannot compose {g} after {f}: target of {f} is not the source of {g}")]
    NotComposable { g: String, f: String },

    #[error("complexes live over different categories")]
    CategoryMismatch,

    #[error("invalid twisted complex: {}", format_violations(.0))]
    InvalidComplex(Vec<Violation>),

    #[error("morphism is not closed")]
    NotClosed,

    #[error("morphism has degree {0}, expected 0")]
    DegreeMismatch(i64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("complex is not admissible: endomorphisms in negative degrees {0:?}")]
    NotAdmissible(Vec<i64>),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("reduction step did not lower complexity ({before} -> {after}) in case {case}")]
    ComplexityNotReduced { case: String, before: i64, after: i64 },

    #[error("structural check failed: {0}")]
    StructuralCheck(String),

    #[error("normalization exceeded {0} iterations")]
    IterationLimit(usize),

    #[error("certificate did not verify: {0}")]
    CertificateRejected(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("cover index {index} is not divisible by the characteristic {characteristic}")]
    CoverCharacteristic { index: u64, characteristic: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}
