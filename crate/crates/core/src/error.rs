use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("series division by a series with zero constant term")]
    ZeroLeadingCoefficient,

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("the zero function has no transform ratio")]
    ZeroFunction,

    #[error("exponents must be distinct positive integers (got n = {n}, m = {m})")]
    InvalidExponents { n: u32, m: u32 },

    #[error("Laplace transform diverges for lambda = {lambda}")]
    DivergentTransform { lambda: f64 },

    #[error("transform of the denominator power vanishes at lambda = {lambda}")]
    ZeroDenominator { lambda: f64 },

    #[error("function does not vanish on [0, {shift})")]
    NotVanishing { shift: String },

    #[error("invalid piecewise polynomial: {0}")]
    InvalidPiecewise(String),

    #[error("expansion is not the ratio of any admissible function: {0}")]
    InconsistentRatio(String),

    #[error("leading coefficient has no real root: normalised value {value} is negative and n - m is even")]
    NoRealRoot { value: String },

    #[error("leading coefficient is irrational: {value} has no rational root of order {degree}")]
    IrrationalRoot { value: String, degree: u32 },

    #[error("ratio expansion truncated at order {available}, need at least {required}")]
    InsufficientOrder { required: usize, available: usize },

    #[error("K = {k} is at or beyond the admissible bound {bound}")]
    OutOfRange { k: f64, bound: f64 },

    #[error("quadrature did not reach tolerance {requested:e} (estimated error {estimated:e})")]
    QuadratureFailure { requested: f64, estimated: f64 },

    #[error("an auction needs at least two bidders (got {0})")]
    InvalidBidderCount(u32),

    #[error("malformed rational {0:?}")]
    ParseRational(String),
}
