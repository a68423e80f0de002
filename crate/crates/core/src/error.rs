use thiserror::Error;

/// Errors raised by the model, the experiment protocols and the config layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no transition in range: {0}")]
    NoTransitionInRange(String),

    #[error("cooperative seed not found: no Ni with P_f >= {0} for all larger Ni")]
    SeedNotFound(f64),

    #[error("insufficient tail samples: {found} with k >= {k_min}, need at least {needed}")]
    InsufficientTailSamples {
        found: usize,
        needed: usize,
        k_min: usize,
    },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("config error for key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
