//! Error type shared by every module of the crate.

/// Everything that can go wrong when building pairs or analyzing elements.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Shapes or ambient dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A pair of elements that must commute does not; the message carries
    /// the first nonzero entry of the offending bracket.
    #[error("elements do not commute: {0}")]
    NonCommuting(String),

    /// An element does not belong to the space it was claimed to be in.
    #[error("membership failure: {0}")]
    Membership(String),

    /// The requested family, parameters or operation are out of scope.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A Satake sub-diagram component did not match any known pattern.
    #[error("classification failure: {0}")]
    Classification(String),

    /// Malformed textual input (scalars, element files, CLI values).
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal cross-check failed; indicates a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
