use thiserror::Error;

/// Errors raised by model construction, estimation and testing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or argument lies outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The data carry no information for an interior estimate
    /// (constant path, empty transition row, boundary estimate).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A likelihood or score could not be evaluated (non-positive log argument,
    /// vanishing denominator).
    #[error("evaluation error: {0}")]
    Eval(String),

    /// The raw likelihood-ratio statistic came out clearly negative, which means the
    /// unrestricted maximization failed.
    #[error("likelihood-ratio statistic {0} is negative beyond tolerance; unrestricted MLE failed")]
    NegativeStatistic(f64),

    /// Nothing to plot or aggregate.
    #[error("empty data")]
    EmptyData,

    /// Malformed path file.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable name used by the command-line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::DegenerateData(_) => "DegenerateData",
            Error::Eval(_) => "EvalError",
            Error::NegativeStatistic(_) => "NegativeStatistic",
            Error::EmptyData => "EmptyData",
            Error::Parse(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
