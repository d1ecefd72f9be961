use thiserror::Error;

/// Errors raised by the simulator, the probes and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A field was handed to an operation expecting the other representation,
    /// or violated a structural contract (shape, realness, grid mismatch).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A step, sample or grid budget would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Free evolution would wrap around the periodic box within the window.
    #[error("wrap-around: {0}")]
    WrapAround(String),

    /// Scaling fit preconditions are not met.
    #[error("fit error: {0}")]
    Fit(String),

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
