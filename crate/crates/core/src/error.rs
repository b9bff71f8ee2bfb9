use thiserror::Error;

/// Every failure the library can report. Messages are single-line so the CLI
/// can forward them verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain: {0}")]
    Domain(String),
    #[error("config: {0}")]
    Config(String),
    #[error("index: {0}")]
    Index(String),
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("eval: {0}")]
    Eval(String),
    #[error("out of domain: {0}")]
    OutOfDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine tag used in CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Config(_) => "config",
            Error::Index(_) => "index",
            Error::SingularSystem(_) => "singular_system",
            Error::Eval(_) => "eval",
            Error::OutOfDomain(_) => "out_of_domain",
        }
    }
}
