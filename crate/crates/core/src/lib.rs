//! Window mean-payoff games on multi-weighted graphs.
//!
//! Games are read from the `wgame` text format ([`model::parse_game`]).
//! Solvers work with threshold 0; other thresholds go through
//! [`model::normalize_threshold`] first.

#![allow(clippy::needless_range_loop)]

pub mod arena;
pub mod classical;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod strategy;
pub mod window1d;
pub mod windowkd;

pub use arena::StateSet;
pub use error::{Error, Result};
pub use model::{GameStructure, Lasso, ObjectiveKind, ObjectiveSpec, Player};
