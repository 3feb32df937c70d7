//! Crate-wide error type.

use thiserror::Error;

/// Color identifiers are 1-based integers in `1..=q`.
pub type Color = u32;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("empty color list at vertex {0}")]
    EmptyList(usize),
    #[error("color {color} at vertex {vertex} outside palette 1..={q}")]
    ColorOutOfRange { vertex: usize, color: Color, q: u32 },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("vertex {u} is not a neighbor of vertex {v}")]
    NotNeighbor { v: usize, u: usize },
    #[error("color {color} not in the list of vertex {vertex}")]
    ColorNotInList { vertex: usize, color: Color },
    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("partial coloring is not extendable: {0}")]
    NonExtendable(String),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("the exact oracle supports at most 128 colors (got q = {0})")]
    TooManyColors(u32),
    #[error("instance is unsatisfiable")]
    Unsatisfiable,
    #[error("marginal of (vertex {vertex}, color {color}) is zero; cannot condition on it")]
    ZeroMarginal { vertex: usize, color: Color },
    #[error("degenerate marginal: P(sigma_{vertex} != {color}) = 0")]
    DegenerateMarginal { vertex: usize, color: Color },
    #[error("Glauber dynamics may not be ergodic: |L({0})| < deg({0}) + 2")]
    NotErgodic(usize),
    #[error("operation requires at least two vertices")]
    SingleVertex,
    #[error("eigenvalue solver returned imaginary part {0:.3e} above tolerance")]
    ComplexEigenvalue(f64),
    #[error("eigenvalue iteration failed to converge after {0} iterations")]
    EigenNoConvergence(usize),
    #[error("greedy initial coloring got stuck at vertex {0}")]
    GreedyStuck(usize),
    #[error("invalid instance file: {0}")]
    InvalidInstance(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
