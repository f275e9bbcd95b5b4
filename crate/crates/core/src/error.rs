use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("Stirling number {{{n} {i}}} requested outside 1 <= i <= n")]
    StirlingOutOfRange { n: usize, i: usize },

    #[error("truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series must have zero constant term")]
    NonzeroConstantTerm,

    #[error("vector field a(t) d/dt needs a(0) = a'(0) = 0")]
    NotAVectorField,

    #[error("series must satisfy g(0) = 0 and g'(0) = 1")]
    NotTangentToIdentity,

    #[error("index {index} exceeds bound {bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("operands live on different algebras")]
    SignatureMismatch,

    #[error("operation requires a commutative signature")]
    NotCommutative,

    #[error("operation requires a noncommutative signature")]
    NotNoncommutative,

    #[error("operation requires a unital signature")]
    NotUnital,

    #[error("operation requires at least one {0} generator")]
    MissingGenerator(&'static str),

    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("element is not homogeneous")]
    NotHomogeneous,

    #[error("operands have incompatible parities")]
    ParityMismatch,

    #[error("operator is not odd")]
    NotOdd,

    #[error("operator does not square to zero")]
    NotSquareZero,

    #[error("result needs degree {needed} but the bound is {bound}")]
    DegreeOverflow { needed: usize, bound: usize },

    #[error("linear system is singular")]
    SingularSystem,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
