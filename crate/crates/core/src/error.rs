use thiserror::Error;

/// Errors raised by graph construction, the numerical kernels and the solvers.
///
/// Vertex ids inside error payloads are 0-based, like the rest of the library API.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("non-positive {what} at index {index}: {value}")]
    NonPositiveParameter {
        what: &'static str,
        index: usize,
        value: f64,
    },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("no edge ({0}, {1})")]
    MissingEdge(usize, usize),
    #[error("vertex {0} is not isolated")]
    NotIsolated(usize),
    #[error("removing the given vertex set leaves the graph connected")]
    NotASeparator,
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("the support of the edge weights is disconnected")]
    DisconnectedSupport,
    #[error("the first nonzero eigenvalue has multiplicity zero")]
    DegenerateSpectrum,
    #[error("embedding LP reported infeasible")]
    LpInfeasible,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("graph has {n} vertices, above the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
