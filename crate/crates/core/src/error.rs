use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector has no cone")]
    ZeroVector,
    #[error("pattern and text must be origin squares with m <= n")]
    BadShape,
    #[error("empty string")]
    EmptyString,
    #[error("sequence lengths unsuitable for correlation")]
    SizeError,
    #[error("wildcard present where exact comparison is required")]
    WildcardPresent,
    #[error("window out of range")]
    RangeError,
    #[error("offset outside the valid range")]
    OffsetOutOfRange,
    #[error("need at least two points")]
    TooFew,
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("lattice basis is collinear")]
    CollinearBasis,
    #[error("string carries no truncated-subtile signature")]
    MissingSignature,
    #[error("x/y-truncated subtile where a plain subtile is required")]
    TruncatedInput,
    #[error("boxes or points from different lattice classes")]
    MixedClasses,
    #[error("subtile strings overlap")]
    OverlapError,
    #[error("string is not peripheral at the requested distance")]
    NotPeripheral,
}
