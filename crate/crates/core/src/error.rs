use thiserror::Error;

/// Errors raised by graph construction, estimation and canonical solves.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph is disconnected: node {node} is unreachable from node 0")]
    DisconnectedGraph { node: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("duplicate edge ({source_node}, {target})")]
    DuplicateEdge { source_node: usize, target: usize },
    #[error("edge ({source_node}, {target}) has negative or non-finite weight {weight}")]
    NegativeWeight {
        source_node: usize,
        target: usize,
        weight: f64,
    },
    #[error("node index {index} out of range for a graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("the Laplacian shift operator requires an undirected graph")]
    DirectedGraphUnsupported,
    #[error("shift operator is not normal (relative commutator norm {residual:e})")]
    NotNormal { residual: f64 },
    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),
    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },
    #[error("at least {required} realizations are required, found {found}")]
    TooFewRealizations { required: usize, found: usize },
    #[error("spectral matrix is singular at frequency index {frequency} ({which})")]
    SingularSpectralMatrix {
        frequency: usize,
        which: &'static str,
    },
    #[error("requested rank {requested} exceeds min(p, q) = {max}")]
    RankTooLarge { requested: usize, max: usize },
    #[error("invalid spectral field: {0}")]
    InvalidField(String),
    #[error("mean of dimension {dimension} is not proportional to a basis vector")]
    MeanNotProportionalToBasisVector { dimension: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerical core as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenFailure(_) | Error::SingularSpectralMatrix { .. } | Error::NotNormal { .. }
        )
    }

    /// Frequency index attached to the error, when there is one.
    pub fn frequency(&self) -> Option<usize> {
        match self {
            Error::SingularSpectralMatrix { frequency, .. } => Some(*frequency),
            _ => None,
        }
    }

    pub(crate) fn with_frequency(self, frequency: usize) -> Self {
        match self {
            Error::SingularSpectralMatrix { which, .. } => {
                Error::SingularSpectralMatrix { frequency, which }
            }
            Error::EigenFailure(msg) if !msg.starts_with("frequency index") => {
                Error::EigenFailure(format!("frequency index {frequency}: {msg}"))
            }
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
