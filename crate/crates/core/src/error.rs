//! Error type shared across the crate.
//!
//! Every fallible operation returns one of the named variants below; the
//! variant name is part of the public contract (the CLI surfaces it
//! verbatim), so `Error::name` exposes it as a stable string.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The forgetful-map table has no entry for this coset representative.
    #[error("NotTabulated: no tabulated forgetful image for {0}")]
    NotTabulated(String),

    /// Factor heights do not sum to twice the abelian-variety dimension.
    #[error("HeightMismatch: factor heights sum to {actual}, expected {expected}")]
    HeightMismatch { expected: usize, actual: usize },

    /// Factor dimensions do not sum to the abelian-variety dimension.
    #[error("DimensionMismatch: factor dimensions sum to {actual}, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The slope multiset is not invariant under s -> 1 - s.
    #[error("NotSymmetric: factor ({m},{n}) has no mirror ({n},{m}) of equal multiplicity")]
    NotSymmetric { m: u32, n: u32 },

    /// A factor (m, n) with gcd(m, n) != 1.
    #[error("NotCoprime: factor ({m},{n}) is not coprime")]
    NotCoprime { m: u32, n: u32 },

    /// Two polygons over different ambient dimensions were compared.
    #[error("QMismatch: cannot compare polygons with q={left} and q={right}")]
    QMismatch { left: usize, right: usize },

    /// Signature (a, b) must satisfy a >= b >= 0, a + b >= 1.
    #[error("BadSignature: ({a},{b}) is not a valid signature")]
    BadSignature { a: usize, b: usize },

    /// The permutation is not a symplectic final element for this q.
    #[error("NotInWq: {0} does not lie in W_{1}")]
    NotInWq(String, usize),

    #[error("IndexOutOfRange: index {index} outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// An operation needing the M1/M2 grading was called on an ungraded module.
    #[error("NoSplitting: module carries no M1/M2 splitting")]
    NoSplitting,

    /// An eta vector that cannot come from the claimed signature.
    #[error("EtaInvalid: {0}")]
    EtaInvalid(String),

    #[error("WrongSignature: operation is defined for signature ({want_a},{want_b}), got ({got_a},{got_b})")]
    WrongSignature {
        want_a: usize,
        want_b: usize,
        got_a: usize,
        got_b: usize,
    },

    #[error("NotOddPrime: {0} is not an odd prime")]
    NotOddPrime(u64),

    /// Matrix entries outside the rational integers (e.g. coefficient pairs
    /// in a context that requires Frobenius-fixed entries).
    #[error("NonIntegerEntries: {0}")]
    NonIntegerEntries(String),

    /// A Frobenius matrix with zero determinant has no slope decomposition.
    #[error("SingularMatrix: {0}")]
    SingularMatrix(String),

    /// One leg of the supersingular witness chain failed.
    #[error("WitnessFailure: leg '{leg}' failed: {detail}")]
    WitnessFailure { leg: String, detail: String },

    /// Two classification rules assigned conflicting statuses to a cell.
    #[error("Inconsistent: {0}")]
    Inconsistent(String),

    /// Input that is not syntactically valid (bad JSON, bad cycle string, ...).
    #[error("ParseError: {0}")]
    ParseError(String),

    /// Input that parses but does not match the expected schema.
    #[error("SchemaViolation: {0}")]
    SchemaViolation(String),

    /// Structurally valid data violating a semantic invariant.
    #[error("InvariantViolation: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotTabulated(_) => "NotTabulated",
            Error::HeightMismatch { .. } => "HeightMismatch",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::QMismatch { .. } => "QMismatch",
            Error::BadSignature { .. } => "BadSignature",
            Error::NotInWq(_, _) => "NotInWq",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NoSplitting => "NoSplitting",
            Error::EtaInvalid(_) => "EtaInvalid",
            Error::WrongSignature { .. } => "WrongSignature",
            Error::NotOddPrime(_) => "NotOddPrime",
            Error::NonIntegerEntries(_) => "NonIntegerEntries",
            Error::SingularMatrix(_) => "SingularMatrix",
            Error::WitnessFailure { .. } => "WitnessFailure",
            Error::Inconsistent(_) => "Inconsistent",
            Error::ParseError(_) => "ParseError",
            Error::SchemaViolation(_) => "SchemaViolation",
            Error::InvariantViolation(_) => "InvariantViolation",
        }
    }

    /// True for errors that mean "the input file/string itself is malformed"
    /// rather than "the mathematics rejected the input".
    pub fn is_malformed_input(&self) -> bool {
        matches!(
            self,
            Error::ParseError(_) | Error::SchemaViolation(_) | Error::NonIntegerEntries(_)
        )
    }
}
