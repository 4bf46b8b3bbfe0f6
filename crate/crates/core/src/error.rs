use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Variants are grouped by the layer that produces them; `reason()` gives a
/// stable machine-readable tag used by the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // graph construction
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },
    #[error("edge ({i}, {j}) has non-positive weight {w}")]
    NonpositiveWeight { i: usize, j: usize, w: f64 },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("edge ({i}, {j}) references a node outside 0..{n}")]
    NodeOutOfRange { i: usize, j: usize, n: usize },
    #[error("graph needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("Laplacian rank {rank} is below n-1 = {expected}")]
    SingularBeyondKernel { rank: usize, expected: usize },
    #[error("frequencies are not centered: mean {mean:e} exceeds tolerance {tol:e}")]
    UncenteredFrequencies { mean: f64, tol: f64 },
    #[error("vector length {got} does not match expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    // scalar functions and series
    #[error("argument {value} outside the domain of {func}")]
    DomainError { func: &'static str, value: f64 },
    #[error("exact value of {0}!! does not fit in 128 bits")]
    Overflow(u32),
    #[error("series order {0} must be odd and at least 1")]
    InvalidOrder(usize),
    #[error("series order {requested} exceeds cap {cap}")]
    OrderTooLarge { requested: usize, cap: usize },
    #[error("order {requested} not computed (expansion holds up to {available})")]
    OrderNotComputed { requested: usize, available: usize },

    // solvers
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIterationsExceeded { iterations: usize, residual: f64 },
    #[error("fixed-point iterate left the unit polydisk at iteration {iteration}")]
    IterateLeftDomain { iteration: usize },
    #[error("Jacobian is singular at iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("edge vector is not the sine of a flow (cycle component {membership:e})")]
    NotAFlowSine { membership: f64 },

    // synchronization tests and scans
    #[error("no synchronized solution at the first coupling step {coupling}")]
    NoSolutionAtK0 { coupling: f64 },
    #[error("test {test} never fails up to coupling scale {limit}")]
    TestNeverFails { test: String, limit: f64 },
    #[error("test {test} is not monotone around coupling {coupling}")]
    NonMonotoneDetected { test: String, coupling: f64 },

    // random models
    #[error("no connected draw after {draws} attempts")]
    RetriesExhausted { draws: usize },
    #[error("invalid model parameter: {0}")]
    InvalidSpec(String),

    // experiments and io
    #[error("reference solve failed: {0}")]
    ReferenceSolveFailed(String),
    #[error("parse error at {location}: {message}")]
    ParseError { location: String, message: String },
    #[error("unsupported schema version {0}")]
    UnsupportedSchema(u32),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable identifier for the error kind.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::DisconnectedGraph { .. } => "DisconnectedGraph",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
            Error::NonpositiveWeight { .. } => "NonpositiveWeight",
            Error::SelfLoop(_) => "SelfLoop",
            Error::NodeOutOfRange { .. } => "NodeOutOfRange",
            Error::TooFewNodes(_) => "TooFewNodes",
            Error::SingularBeyondKernel { .. } => "SingularBeyondKernel",
            Error::UncenteredFrequencies { .. } => "UncenteredFrequencies",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DomainError { .. } => "DomainError",
            Error::Overflow(_) => "Overflow",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::OrderTooLarge { .. } => "OrderTooLarge",
            Error::OrderNotComputed { .. } => "OrderNotComputed",
            Error::MaxIterationsExceeded { .. } => "MaxIterationsExceeded",
            Error::IterateLeftDomain { .. } => "IterateLeftDomain",
            Error::SingularJacobian { .. } => "SingularJacobian",
            Error::NotAFlowSine { .. } => "NotAFlowSine",
            Error::NoSolutionAtK0 { .. } => "NoSolutionAtK0",
            Error::TestNeverFails { .. } => "TestNeverFails",
            Error::NonMonotoneDetected { .. } => "NonMonotoneDetected",
            Error::RetriesExhausted { .. } => "RetriesExhausted",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::ReferenceSolveFailed(_) => "ReferenceSolveFailed",
            Error::ParseError { .. } => "ParseError",
            Error::UnsupportedSchema(_) => "UnsupportedSchema",
            Error::Io(_) => "Io",
        }
    }

    /// True for errors caused by invalid graph input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DisconnectedGraph { .. }
                | Error::DuplicateEdge { .. }
                | Error::NonpositiveWeight { .. }
                | Error::SelfLoop(_)
                | Error::NodeOutOfRange { .. }
                | Error::TooFewNodes(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
