use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph contains a directed cycle")]
    CyclicGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid net: {0}")]
    InvalidNet(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("unknown component `{0}`")]
    UnknownComponent(String),

    #[error("node `{node}` has no state {state}")]
    InvalidState { node: String, state: String },

    #[error("component `{0}` appears in both hypothesis and evidence")]
    OverlappingComponents(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    /// The evidence has zero weight, so no conditional can be formed.
    #[error("contradictory evidence: the evidence has zero probability")]
    ContradictoryEvidence,

    #[error("joint state space has {count} states, above the enumeration cap of {cap}")]
    StateSpaceTooLarge { count: u128, cap: u64 },

    #[error("phase undefined because psi01 * conj(psi10) = 0")]
    DegeneratePhase,

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
