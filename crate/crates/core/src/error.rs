use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("eigensolver did not converge after {iterations} iterations (last Rayleigh quotient {rayleigh})")]
    Convergence { iterations: usize, rayleigh: f64 },

    #[error("extension of piece {piece} failed: {reason}")]
    ExtensionFailure { piece: String, reason: String },

    #[error("bound undefined: {0}")]
    BoundUndefined(String),

    #[error("graph bound unavailable for edge {edge}: {reason}")]
    GraphBoundUnavailable { edge: usize, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

impl Error {
    /// Short stable name, used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::DegenerateCurve(_) => "DegenerateCurve",
            Error::Assembly(_) => "AssemblyError",
            Error::Convergence { .. } => "ConvergenceError",
            Error::ExtensionFailure { .. } => "ExtensionFailure",
            Error::BoundUndefined(_) => "BoundUndefined",
            Error::GraphBoundUnavailable { .. } => "GraphBoundUnavailable",
            Error::InvalidGraph(_) => "InvalidGraph",
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
