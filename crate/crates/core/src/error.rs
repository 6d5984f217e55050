use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid needs at least 2 nodes, got {0}")]
    InvalidGrid(usize),
    #[error("grid mismatch: {left} nodes vs {right} nodes")]
    GridMismatch { left: usize, right: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("input is not zero-mean: mean {mean:e} exceeds tolerance {tolerance:e}")]
    NotZeroMean { mean: f64, tolerance: f64 },
    #[error("average-side symbol vanishes at mode {mode} where the difference symbol does not")]
    CompactMaskSingular { mode: usize },
    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error(
        "degenerate constraint: |∇F_d·1| = {projection:e} <= {tolerance:e}; next-level constraint F_1 = {ladder:e}"
    )]
    DegenerateConstraint { projection: f64, tolerance: f64, ladder: f64 },
    #[error("mode {mode} is outside the range of the difference operator")]
    ModeOutOfRange { mode: i64 },
    #[error("scaled wave number {0} is a multiple of π")]
    PoleAtMultipleOfPi(f64),
    #[error("fixed-point iteration did not converge: {iterations} iterations, residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("state became non-finite")]
    NonFiniteState,
    #[error("{0}")]
    Invalid(String),
}
