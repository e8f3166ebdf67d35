use thiserror::Error;

/// Errors surfaced by the harness.
///
/// `Usage` covers malformed arguments and shape mismatches. `Incompatible`
/// means the model under evaluation does not implement a capability the
/// harness needs (fingerprints, cloning); it is reported separately from an
/// axiom failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("model is incompatible with the harness: {0}")]
    Incompatible(String),
}

impl HarnessError {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        HarnessError::Usage(msg.into())
    }

    pub(crate) fn incompatible(msg: impl Into<String>) -> Self {
        HarnessError::Incompatible(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
