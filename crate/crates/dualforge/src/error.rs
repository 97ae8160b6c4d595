use thiserror::Error;

/// Errors raised by the engine. Resource-bound overruns are kept distinct from
/// genuine input errors so callers can map them to a separate exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("partial operation table for '{0}' ({1}); only total structures are supported")]
    PartialOperation(String, String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("not a subuniverse: {0}")]
    NotSubuniverse(String),

    #[error("incompatible structures: {0}")]
    Incompatible(String),

    #[error("invalid reduct: {0}")]
    InvalidReduct(String),

    #[error("relation '{0}' defined by the reduct is empty; relations must be non-empty")]
    EmptyRelation(String),

    #[error("theorem {theorem} requires {field}")]
    MissingField { theorem: String, field: String },

    #[error("unknown catalog name '{0}'")]
    UnknownName(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
