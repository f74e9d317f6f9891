use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    InvalidVertex { vertex: u64, vertex_count: u64 },

    #[error("graph with {vertex_count} vertices exceeds the dense size guard of {limit}")]
    SizeGuard { vertex_count: u64, limit: u64 },

    #[error("schedule infeasible: {0}")]
    Infeasible(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code: 2 for bad input, 3 for an infeasible schedule,
    /// 1 for I/O and serialization failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::InvalidVertex { .. } | Error::SizeGuard { .. } | Error::Config(_) => 2,
            Error::Infeasible(_) => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }
}
