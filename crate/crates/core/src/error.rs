//! Error type shared by every solver entry point.

use std::fmt;

/// A structural problem found by [`crate::model::GameStructure::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    ZeroDimensions,
    DeadEnd(String),
    WeightArity {
        source: String,
        target: String,
        expected: usize,
        got: usize,
    },
    DuplicateEdge {
        source: String,
        target: String,
    },
    InitOutOfRange(usize),
    WeightRange {
        source: String,
        target: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "no states"),
            Violation::ZeroDimensions => write!(f, "dimension count is zero"),
            Violation::DeadEnd(s) => write!(f, "dead-end {s}"),
            Violation::WeightArity {
                source,
                target,
                expected,
                got,
            } => write!(
                f,
                "edge {source} -> {target} has {got} weights, expected {expected}"
            ),
            Violation::DuplicateEdge { source, target } => {
                write!(f, "duplicate edge {source} -> {target}")
            }
            Violation::InitOutOfRange(i) => write!(f, "initial state index {i} is undeclared"),
            Violation::WeightRange { source, target } => {
                write!(f, "edge {source} -> {target} has a weight outside ±2^40")
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("duplicate state {0}")]
    DuplicateState(String),
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("invalid game: {}", join(.0))]
    InvalidGame(Vec<Violation>),
    #[error("expected a one-dimensional game, found {0} dimensions")]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, found {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("window bound must be at least 1")]
    ZeroWindow,
    #[error("threshold denominator is zero")]
    ZeroDenominator,
    #[error("lasso is inconsistent with the game: {0}")]
    InconsistentLasso(String),
    #[error("malformed strategy: {0}")]
    MalformedStrategy(String),
    #[error("winning set is empty")]
    EmptyWinningSet,
    #[error("{what} exceeds the budget of {budget}")]
    Budget { what: String, budget: usize },
    #[error("product exceeds the cap of {cap} states")]
    ProductCap { cap: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("internal error: {0}")]
    Internal(String),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
