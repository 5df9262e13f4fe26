use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot parse {text:?} as a number: unexpected character {ch:?} at byte {pos}")]
    ParseNumber { text: String, ch: char, pos: usize },

    #[error("cannot parse {0:?} as a number: empty input")]
    EmptyNumber(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("tableau shapes differ")]
    ShapeMismatch,

    #[error("pivot entry at row {row}, column {col} is zero")]
    ZeroPivot { row: usize, col: usize },

    #[error("column {0} is already basic")]
    PivotOnBasic(usize),

    #[error("invalid family parameters: {0}")]
    Family(String),

    #[error("instance is not feasible at the origin (negative right-hand side in row {0})")]
    NegativeRhs(usize),

    #[error("iteration {iteration}: variable {var} violates its expanded bound")]
    ExpandInfeasible { iteration: usize, var: usize },

    #[error("instance text: {0}")]
    InstanceFormat(String),
}
