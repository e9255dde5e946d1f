use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    ConfigInvalid { field: String, reason: String },

    #[error("enumeration budget exceeded: {needed} field elements > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),

    #[error("Newton polygon is not constant: special {special} vs generic {generic}")]
    NonConstantPolygon { special: String, generic: String },

    #[error("generic Newton polygon is indeterminate: lower bound {lower}, sampled estimate {upper}")]
    Indeterminate { lower: String, upper: String },

    #[error(
        "slope {slope} is not an integral multiple of 1/{f}; pass to the unramified extension \
         of degree {degree} of the point ring (Frobenius power q^{degree}) first"
    )]
    NonIntegralSlope { slope: String, f: u32, degree: u64 },

    #[error("slope hypothesis violated: {0}")]
    SlopeHypothesis(String),

    #[error("Frobenius lattice is not divisible by p^{power} at the slope-{slope} step")]
    LatticeNotDivisible { slope: String, power: i64 },

    #[error("gcd(r, s) must be 1, got r = {r}, s = {s}")]
    NotCoprime { r: i64, s: i64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("window too small: degree identity needs D > {needed}, got D = {window}")]
    WindowTooSmall { needed: u64, window: usize },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigInvalid { field: field.into(), reason: reason.into() }
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionInsufficient(msg.into())
    }

    /// Stable machine-readable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ConfigInvalid { .. } => "config-invalid",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::PrecisionInsufficient(_) => "precision-insufficient",
            Error::NonConstantPolygon { .. } => "non-constant-polygon",
            Error::Indeterminate { .. } => "indeterminate",
            Error::NonIntegralSlope { .. } => "non-integral-slope",
            Error::SlopeHypothesis(_) => "slope-hypothesis-violated",
            Error::LatticeNotDivisible { .. } => "lattice-not-divisible",
            Error::NotCoprime { .. } => "gcd-violation",
            Error::OutOfRange(_) => "out-of-range",
            Error::WindowTooSmall { .. } => "window-too-small",
            Error::Inconsistency(_) => "internal-inconsistency",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
