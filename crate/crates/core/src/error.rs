use crate::numerics::NumericError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("invalid label set: {0}")]
    InvalidLabels(String),
    #[error("table shape mismatch: {0}")]
    Shape(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label cardinalities do not allow a time reverse: {0}")]
    CardinalityMismatch(String),
    #[error("invalid ontological model: {0}")]
    InvalidModel(String),
    #[error("bijection domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("experiments are not operational time reverses: {0}")]
    NotOperationalReverses(String),
    #[error("ontic space of size {size} exceeds the search cap {cap}")]
    SpaceTooLarge { size: usize, cap: usize },
    #[error("direction not representable exactly: {0}")]
    InexactDirection(String),
    #[error("experiment is not its own operational time reverse: {0}")]
    NotSelfReverse(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("preparation signals to the measurement outcome: {0}")]
    SignallingPreparation(String),
    #[error("outcomes are not {{+1, -1}}: {0}")]
    NonBinaryOutcomes(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}
