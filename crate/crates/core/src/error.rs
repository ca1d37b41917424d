use thiserror::Error;

use crate::metrics::DistanceBound;

/// Errors produced by `m2m-core`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("NonZeroDiagonal: distance[{index}][{index}] = {value}")]
    NonZeroDiagonal { index: usize, value: f64 },

    #[error("Asymmetric: distance[{i}][{j}] = {a} but distance[{j}][{i}] = {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },

    #[error("NegativeEntry: {field} = {value}")]
    NegativeEntry { field: String, value: f64 },

    #[error("NonFinite: {field} = {value}")]
    NonFinite { field: String, value: f64 },

    #[error("TriangleViolation: d({i},{k}) = {ik} > d({i},{j}) + d({j},{k}) = {via}")]
    TriangleViolation { i: usize, j: usize, k: usize, ik: f64, via: f64 },

    #[error("IndexOutOfRange: {field} refers to point {index}, space has {len} points")]
    IndexOutOfRange { field: String, index: usize, len: usize },

    #[error("UnmappedPoint: map has no image for point {index}")]
    UnmappedPoint { index: usize },

    #[error("BudgetExceeded: exact evaluation needs {required} tuples, budget is {budget}")]
    BudgetExceeded { required: f64, budget: f64 },

    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),

    #[error("PreconditionViolated: {0}")]
    PreconditionViolated(String),

    #[error("SupportTooLarge: both supports exceed {limit} points ({left} and {right})")]
    SupportTooLarge { left: usize, right: usize, limit: usize },

    #[error("OptimizerBudgetExceeded after {evaluations} evaluations, best interval [{}, {}]", best.lower, best.upper)]
    OptimizerBudgetExceeded { best: Box<DistanceBound>, evaluations: usize },

    #[error("UnknownLeaf: ({species}, {individual})")]
    UnknownLeaf { species: usize, individual: usize },

    #[error("UnknownSpecies: {0}")]
    UnknownSpecies(usize),

    #[error(
        "DegenerateParams: gamma_s = {gamma_s} and gamma_g = {gamma_g} are too close for the hypoexponential form"
    )]
    DegenerateParams { gamma_s: f64, gamma_g: f64 },

    #[error("InvalidParams: {0}")]
    InvalidParams(String),

    #[error("TieDetected: two events at time {0}")]
    TieDetected(f64),

    #[error("ParseError: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by an exhausted computation budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::SupportTooLarge { .. } | Error::OptimizerBudgetExceeded { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
