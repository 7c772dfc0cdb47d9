use thiserror::Error;

/// Errors raised anywhere in the simulation and benchmarking pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid size, probability, shot count or experiment field.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed gate or circuit (bad arity, repeated or out-of-range qubits).
    #[error("circuit error: {0}")]
    Circuit(String),

    /// The request exceeds what the dense-matrix paths can handle.
    #[error("capability error: {0}")]
    Capability(String),

    /// A gate could not be rewritten into the native basis.
    #[error("lowering error at `{gate}`: {reason}")]
    Lowering { gate: String, reason: String },

    /// Missing or inconsistent inputs to a metric.
    #[error("metrics error: {0}")]
    Metrics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn circuit(msg: impl Into<String>) -> Error {
    Error::Circuit(msg.into())
}
