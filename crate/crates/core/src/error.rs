use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("input contains no {0}")]
    Empty(&'static str),
    #[error("node {node} appears in more than one community")]
    Overlap { node: u64 },
    #[error("node {node} does not fit a universe of {universe} nodes")]
    OutOfRange { node: u64, universe: usize },
    #[error("node {0} is not part of the network")]
    UnknownNode(u64),
    #[error("partitions disagree on universe size ({0} vs {1})")]
    UniverseMismatch(usize, usize),
    #[error("universe size must be positive")]
    EmptyUniverse,
    #[error("network has no edges")]
    NoEdges,
    #[error("invalid worker configuration: {0}")]
    Workers(String),
    #[error("degenerate {0}: denominator is zero")]
    Degenerate(&'static str),
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
    #[error("malformed ring message: {0}")]
    Wire(String),
    #[error("worker {worker} failed: {reason}")]
    Worker { worker: usize, reason: String },
    #[error("results diverge across worker counts: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
