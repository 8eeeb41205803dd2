use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: u32, v: u32 },

    #[error("missing edge ({u}, {v})")]
    MissingEdge { u: u32, v: u32 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("insertion pool exhausted")]
    PoolExhausted,

    #[error("walk index underflow at node {node}: need {need} walks, have {have}")]
    IndexUnderflow { node: u32, need: usize, have: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error("graph too large for the dense oracle: n={n} exceeds {max}")]
    OracleTooLarge { n: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
