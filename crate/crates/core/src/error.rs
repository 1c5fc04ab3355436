use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("automorphism is singular (rank {rank} < {expected})")]
    SingularAutomorphism { rank: usize, expected: usize },

    #[error("vector lies outside the Lie algebra (residual {residual:e})")]
    NotInAlgebra { residual: f64 },

    #[error("bracket closure still growing after {rounds} rounds (dimension {dim})")]
    ClosureDidNotConverge { rounds: usize, dim: usize },

    #[error("degenerate chart: right-translation Jacobian is singular at {point:?}")]
    DegenerateChart { point: Vec<f64> },

    #[error("map is not invertible: {0}")]
    NotInvertible(String),

    #[error("control component {index} = {value} is outside [{lower}, {upper}]")]
    ControlOutOfRange {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("control component {index} = {value} is within {margin:e} of the boundary of U")]
    BoundaryMargin {
        index: usize,
        value: f64,
        margin: f64,
    },

    #[error("insufficient samples: {found} neighbours within radius, need {required}")]
    InsufficientSamples { found: usize, required: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid control range: {0}")]
    InvalidRange(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("{0}")]
    SystemFile(String),
}
