use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// A density was requested from a law that has none.
    NoDensity(String),
    /// Quadrature or differentiation did not reach the requested tolerance.
    /// Carries the best value obtained and its error estimate.
    NumericFailure { value: f64, error_estimate: f64 },
    /// One-step inversion with `beta > 1` was requested without opting in.
    UseIterative { beta: f64 },
    /// A stage of the iterative inversion produced a non-monotone CDF.
    StageFailure { stage: usize, violation: f64 },
    /// The data make an estimator degenerate (all values equal, |rho| = 1, ...).
    Degenerate(String),
    /// The law could not be placed in a max-domain of attraction.
    Unclassified,
    /// An error raised inside a named pipeline stage.
    InStage { stage: &'static str, inner: Box<Error> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical machinery rather than bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::NumericFailure { .. } | Error::StageFailure { .. } => true,
            Error::InStage { inner, .. } => inner.is_numeric(),
            _ => false,
        }
    }

    /// Best available value for a numeric failure.
    pub fn estimate(&self) -> Option<f64> {
        match self {
            Error::NumericFailure { value, .. } => Some(*value),
            Error::InStage { inner, .. } => inner.estimate(),
            _ => None,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NoDensity(what) => write!(f, "no density: {what}"),
            Error::NumericFailure {
                value,
                error_estimate,
            } => write!(
                f,
                "numeric failure: tolerance not met (value {value:e}, error estimate {error_estimate:e})"
            ),
            Error::UseIterative { beta } => write!(
                f,
                "beta = {beta} > 1: use invert_iterative or allow higher-order differentiation"
            ),
            Error::StageFailure { stage, violation } => write!(
                f,
                "inversion stage {stage} is non-monotone by {violation:e}"
            ),
            Error::Degenerate(msg) => write!(f, "degenerate input: {msg}"),
            Error::Unclassified => write!(f, "law could not be classified into a max-domain"),
            Error::InStage { stage, inner } => write!(f, "{stage}: {inner}"),
        }
    }
}

impl core::error::Error for Error {}
