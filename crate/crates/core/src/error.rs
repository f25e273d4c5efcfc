use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("pole at {point}")]
    Pole { point: String },

    #[error("pole at index {index:?}")]
    PoleAt { index: Vec<i64> },

    #[error("exponent {exponent} is not divisible by {modulus}")]
    NotDivisible { exponent: i64, modulus: u32 },

    #[error("q-derivative needs q itself as the central variable (power split is {0})")]
    FractionalBase(u32),

    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),

    #[error("operator variant mismatch")]
    VariantMismatch,

    #[error("the zero operator has no leading monomial")]
    ZeroOperator,

    #[error("coefficient {0} is not a Laurent polynomial in q; clear denominators first")]
    NonPolynomialCoefficient(String),

    #[error("index {index:?} is outside the naturals domain")]
    OutOfDomain { index: Vec<i64> },

    #[error("unknown sequence `{0}`")]
    UnknownSequence(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(
        "underdetermined: {unknowns} unknowns but only {points} fit points, enlarge the window"
    )]
    Underdetermined { unknowns: usize, points: usize },

    #[error("certificate is incomplete: {0}")]
    IncompleteCertificate(String),

    #[error("descent did not produce a nonzero classical operator within {0} rounds")]
    DescentCap(usize),

    #[error("every sample point hit a pole after {0} retries")]
    SamplingFailed(usize),

    #[error("{0}")]
    Invalid(String),
}
