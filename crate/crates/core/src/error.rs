use thiserror::Error;

/// Errors produced by the shock-profile library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shock amplitude {eps} too large: {reason}")]
    AmplitudeTooLarge { eps: f64, reason: String },

    #[error("degenerate shock (zero amplitude or collapsed unstable eigenvalue)")]
    DegenerateShock,

    #[error("integration failed at xi = {xi}: {reason}")]
    IntegrationFailure {
        xi: f64,
        state: [f64; 3],
        reason: String,
    },

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("abscissa {0} outside the profile span")]
    Range(f64),

    #[error("finite-difference window is not uniformly spaced")]
    Spacing,

    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    #[error("no profile nodes survive the exclusion threshold")]
    EmptyWindow,

    #[error("fit window too short: {0}")]
    FitWindow(String),

    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
