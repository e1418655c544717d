use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    VertexRange { line: usize, vertex: u64, n: usize },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u64 },
    #[error("missing `p edge <n> <m>` header")]
    MissingHeader,
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermutationError {
    #[error("point {point} out of range 1..={n}")]
    OutOfRange { point: usize, n: usize },
    #[error("point {point} appears more than once")]
    NotBijective { point: usize },
    #[error("malformed cycle notation: {0:?}")]
    Syntax(String),
}

/// A caller broke an operation's precondition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractViolation {
    #[error("vertex {0} is already a singleton cell")]
    AlreadySingleton(u32),
    #[error("trace was not recorded in compare mode")]
    NotComparing,
    #[error("base point {0} appears more than once")]
    DuplicateBasePoint(u32),
    #[error("base must not be empty")]
    EmptyBase,
    #[error("node trace deviates from the target")]
    DeviatedNode,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute force refused: n = {0} exceeds the cap of 10")]
    TooLarge(usize),
    #[error("search tree too large, gave up after {0} nodes")]
    TreeTooLarge(usize),
}
