use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("data error at node {node}: {msg}")]
    Data { node: usize, msg: String },

    #[error("argument error: {0}")]
    Argument(String),

    #[error("unsupported obstacle: {0}")]
    UnsupportedObstacle(String),

    #[error("degenerate rescale: {0}")]
    DegenerateRescale(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("degenerate candidate: blowup trace vanishes on the thin plane")]
    DegenerateCandidate,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
