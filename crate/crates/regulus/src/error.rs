use thiserror::Error;

/// Crate-wide error type. Randomized routines distinguish budget exhaustion
/// (`LasVegas`, `Budget`) from structural failures so callers can decide
/// whether a retry with a different seed is worthwhile.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("vertex id {id} out of range for vertex count {n}")]
    VertexOutOfRange { id: u32, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("randomized attempt budget exhausted after {attempts} attempts: {reason}")]
    LasVegas { attempts: u64, reason: String },

    #[error("search budget exhausted: {0}")]
    Budget(String),

    #[error("route failed: {0}")]
    RouteFailed(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
