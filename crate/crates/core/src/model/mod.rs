//! Games, plays, objectives and their exact evaluation.

mod eval;
mod format;
mod game;
mod lasso;
mod normalize;
mod objective;
mod report;

pub use eval::{eval_lasso, weight_sequences, LassoEval, WeightSeq};
pub(crate) use format::{expect_arity, tokenize, Token};
pub use format::{parse_game, serialize_game};
pub use game::{Edge, GameBuilder, GameStructure, Player, StateId, MAX_ABS_WEIGHT};
pub use lasso::Lasso;
pub use normalize::{normalize_threshold, Normalized, ThresholdMode};
pub use objective::{
    parse_rational, parse_threshold, ObjectiveKind, ObjectiveSpec, Rational, Value,
};
pub use report::SolveReport;
