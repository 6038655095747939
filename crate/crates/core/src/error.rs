use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("vertex set must be a proper nonempty subset")]
    TrivialSet,
    #[error("{what}: limit {limit}, got {got}")]
    Capacity { what: &'static str, limit: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("bandwidth violation at node {node}, edge {edge}, round {round}: {words} words > {limit}")]
    Bandwidth { node: usize, edge: usize, round: u64, words: usize, limit: usize },
    #[error("node {node} addressed non-neighbor {target} in round {round}")]
    Locality { node: usize, target: usize, round: u64 },
    #[error("word value {value} exceeds {bits}-bit word at node {node}, round {round}")]
    WordWidth { node: usize, round: u64, value: u64, bits: u32 },
    #[error("simulation exceeded {0} rounds")]
    Timeout(u64),
    #[error("no charge formula registered for '{0}'")]
    UnknownCharge(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
