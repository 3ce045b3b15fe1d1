//! Unordered CNF games: two players alternately assign variables of a CNF,
//! T aiming to satisfy it and F to falsify it.
//!
//! The crate covers instance handling, exact potentials over `Q(√2)`, the
//! extremal constructions, both players' potential and pairing strategies,
//! an exhaustive solver, and a match and sweep harness.

pub mod cnf;
pub mod constructions;
pub mod format;
pub mod game;
pub mod harness;
pub mod potential;
pub mod quad;
pub mod solver;
pub mod strategy;

pub use cnf::{Assignment, Clause, Cnf, CnfError, Evaluation, GameInstance, Literal, Move, Pattern, Player, Transcript, Var};
pub use game::GameState;
pub use potential::PotentialScheme;
pub use quad::Quad;
