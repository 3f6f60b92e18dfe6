use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate segment")]
    DegenerateSegment,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("weight queried for impossible strategy")]
    ImpossibleStrategy,
    #[error("weight undefined for zero-throughput sample")]
    ZeroThroughput,
    #[error("direction sampling failed after {0} retries")]
    SamplingFailed(usize),
    #[error("rejection budget exhausted after {0} attempts (scene too occluded)")]
    RejectionBudget(usize),
    #[error("albedo must be < 1 (got {0})")]
    InvalidAlbedo(f64),
    #[error("invalid path: {0}")]
    InvalidPath(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
