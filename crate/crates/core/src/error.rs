use thiserror::Error;

/// Error type for value-level preconditions.
///
/// Shape mismatches (unequal truncation degrees, orders or site counts) are
/// programming errors and panic instead; these variants cover conditions that
/// depend on the actual coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UmbraError {
    #[error("reciprocal undefined: constant term is zero")]
    ZeroConstantTerm,
    #[error("composition undefined: inner series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("compositional inverse undefined: linear coefficient is zero")]
    ZeroLinearCoefficient,
    #[error("compositional inverse undefined: linear part is singular")]
    SingularLinearPart,
    #[error("family construction requires the linear slot to be the identity")]
    NonMonicLinearPart,
    #[error("lifting requires a_0 = 0 and a_1 = 1 (got a_0 = {0}, a_1 = {1})")]
    BadLiftNormalization(String, String),
    #[error("Sheffer construction requires tau(0) = 1 (got {0})")]
    BadTauNormalization(String),
    #[error("lifted Sheffer construction requires c_0 = 0 (got {0})")]
    BadShiftSeriesNormalization(String),
    #[error("degree {degree} exceeds truncation degree {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error("operator not invertible: it annihilates constants")]
    NonInvertibleOperator,
    #[error("test functions must have disjoint supports (both nonzero at site {0})")]
    OverlappingSupports(usize),
    #[error("operation requires a lifted family")]
    NotLifted,
    #[error("family and measure do not match: {family} polynomials vs {measure} measure")]
    MeasureMismatch { family: String, measure: String },
    #[error("Abel parameter must be nonzero")]
    ZeroAbelParameter,
    #[error("site space requires at least one site and positive weights")]
    BadSiteSpace,
    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, UmbraError>;
