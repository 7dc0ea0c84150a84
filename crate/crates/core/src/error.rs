use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its domain (negative variance, p outside (0,1), ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    /// The posterior does not integrate to a finite value.
    #[error("improper posterior: {0}")]
    ImproperPosterior(String),

    /// Improper priors cannot carry testing weights: their normalizing
    /// constant is arbitrary and would fix the Bayes factor at will.
    #[error("improper prior banned in testing: {0}")]
    ImproperPrior(String),

    #[error("the {0} distribution has no finite mean")]
    UndefinedMean(&'static str),

    #[error("design matrix is rank deficient: {0}")]
    RankDeficient(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of the mathematics rather than of the input:
    /// improper posteriors, rank deficiency, non-convergence.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ImproperPosterior(_)
                | Error::ImproperPrior(_)
                | Error::UndefinedMean(_)
                | Error::RankDeficient(_)
                | Error::Numerical(_)
        )
    }
}
