use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violates the invariant of the type it was meant to build.
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    /// A formula was evaluated outside the region where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("realization {index}: {source}")]
    Realization {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown sweep axis `{0}` (expected `mean_f_db` or `d_sr2`)")]
    UnknownAxis(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            reason: reason.into(),
        }
    }
}
