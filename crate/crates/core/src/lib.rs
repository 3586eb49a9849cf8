//! Matching-pennies games in which actions must be planned, plans are
//! partially scouted by the opponent, and players may revise before acting.
//!
//! - [`game`]: actions, signals, decoys, and execute/revise rules
//! - [`analytic`]: closed-form equilibrium quantities
//! - [`engine`]: seeded, thread-count independent Monte Carlo
//! - [`solver`]: exhaustive enumeration, best responses, and fixed points
//! - [`stats`]: interval estimates and goodness of fit

pub mod analytic;
pub mod engine;
pub mod error;
pub mod game;
pub mod solver;
pub mod stats;

pub use engine::{Estimates, EpisodeOutcome, PolicyProfile, Simulator};
pub use error::{Error, Result};
pub use game::{Action, BeliefMode, GameParams, IterationState, PayoffPair, Player, Signal, Variant};
pub use solver::{EnumeratedGame, EquilibriumSolution};
pub use stats::Estimate;
