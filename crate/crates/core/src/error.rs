use thiserror::Error;

/// Library-wide error type.
///
/// The variants mirror the failure classes of the operations: bad inputs
/// (`Domain`, `Precondition`, `Data`, `Contract`), budget exhaustion
/// (`Resource`, which carries the tolerance that *would* have been
/// achievable within the budget), unsupported method/distribution pairings
/// (`Capability`), parameter overflow (`Range`) and evaluation at a pole
/// (`Pole`).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource budget exceeded: {msg}; achievable tolerance {achievable_tol:e}")]
    Resource { msg: String, achievable_tol: f64 },
    #[error("capability error: {0}")]
    Capability(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag, used by the CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Resource { .. } => "resource",
            Error::Capability(_) => "capability",
            Error::Data(_) => "data",
            Error::Range(_) => "range",
            Error::Pole(_) => "pole",
            Error::Contract(_) => "contract",
        }
    }
}
