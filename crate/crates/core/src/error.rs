use thiserror::Error;

/// Every failure the engines can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidSpec(String),
    #[error("integral does not converge: {0}")]
    NonConvergent(String),
    #[error("function is not integrable: {0}")]
    NonIntegrable(String),
    #[error("class has a pole at L = 1")]
    PoleAtOne,
    #[error("no value supplied for symbol `{0}`")]
    MissingSymbol(String),
    #[error("ideal `{0}` is trivial (all orders vanish)")]
    TrivialIdeal(String),
    #[error("cone is not pointed")]
    NotPointed,
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("value is not rational: {0}")]
    NotRational(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }

    /// True when the error describes malformed input rather than a domain failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidSpec(_) | Error::Parse(_) | Error::InvalidMorphism(_))
    }

    /// Stable name of the variant, for structured output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::NonConvergent(_) => "NonConvergent",
            Error::NonIntegrable(_) => "NonIntegrable",
            Error::PoleAtOne => "PoleAtOne",
            Error::MissingSymbol(_) => "MissingSymbol",
            Error::TrivialIdeal(_) => "TrivialIdeal",
            Error::NotPointed => "NotPointed",
            Error::InvalidMorphism(_) => "InvalidMorphism",
            Error::Unsupported(_) => "Unsupported",
            Error::NotRational(_) => "NotRational",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
