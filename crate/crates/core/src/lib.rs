//! Workbench for multiplayer nonlocal games.
//!
//! Games are defined over a [`Scenario`] with exact rational input weights and
//! a winning predicate. Their values can be computed classically (exhaustive
//! enumeration), under no-signaling (linear programming), for explicit
//! quantum strategies (Born rule, see-saw refinement), and bounded from above
//! by the NPA moment-matrix hierarchy.

pub mod bell;
pub mod catalog;
pub mod classical;
pub mod error;
pub mod formats;
pub mod game;
pub mod linalg;
pub mod npa;
pub mod quantum;
pub mod solvers;

pub use error::{Error, Result};
pub use game::{
    behavior_from_correlators, behavior_of_deterministic, correlators, game_value,
    AnswerConstraint, Behavior, CorrelatorTable, DeterministicStrategy, Game, LocalModel, Party,
    Scenario,
};
