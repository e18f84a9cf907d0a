use thiserror::Error;

/// Errors surfaced by construction, certification, and height computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("logarithm of a non-positive value")]
    NonPositiveLog,
    #[error("singular curve: discriminant vanishes")]
    SingularCurve,
    #[error("point ({x}, {y}) is not on the curve")]
    NotOnCurve { x: String, y: String },
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("parameter kind {kind} does not apply to family {family}")]
    ParameterKind { family: String, kind: String },
    #[error("triple generators must satisfy m > n > 0")]
    GeneratorOrder,
    #[error("triple generators must be coprime")]
    GeneratorsNotCoprime,
    #[error("triple generators must not both be odd")]
    GeneratorsBothOdd,
    #[error("not a Pythagorean triple: {0}")]
    NotPythagorean(String),
    #[error("triple is not primitive")]
    NotPrimitive,
    #[error("curve coefficients are not all integers")]
    NotIntegral,
    #[error("factorization budget exceeded on {0}")]
    FactorBudget(String),
    #[error("requested precision not achieved (error bound {got:e}, target {want:e})")]
    Precision { got: f64, want: f64 },
    #[error("operation requires an affine point")]
    InfinitePoint,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for input/usage problems (CLI exit 2), false for computational
    /// failures (CLI exit 3).
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::FactorBudget(_) | Error::Precision { .. })
    }
}
