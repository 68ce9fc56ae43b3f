use thiserror::Error;

/// Everything that can go wrong while building or checking event structures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("event '{0}' declared twice")]
    DuplicateEvent(String),
    #[error("unknown event '{0}'")]
    UnknownEvent(String),
    #[error("causality cycle through event '{0}'")]
    CausalityCycle(String),
    #[error("events '{0}' and '{1}' are causally related and in conflict")]
    ConflictWithCause(String, String),
    #[error("event '{0}' is in conflict with itself after hereditary closure")]
    SelfConflict(String),
    #[error("terminating set {{{0}}} is not a configuration")]
    NotAConfiguration(String),
    #[error("{what} exceeds cap ({count} > {limit})")]
    CapExceeded {
        what: &'static str,
        count: usize,
        limit: usize,
    },
    #[error("malformed relation element: {0}")]
    MalformedElement(String),
    #[error("arena contains a cycle")]
    ArenaCycle,
}

impl Error {
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
