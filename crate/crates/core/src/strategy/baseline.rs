//! Opponents that are not tied to a construction.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{GameInstance, Move, Player};
use crate::game::GameState;
use crate::solver::{Solver, SolverConfig};

use super::{Strategy, StrategyError};

/// Plays the solver's principal move. Clones share one memo table.
#[derive(Clone)]
pub struct OptimalStrategy {
    player: Player,
    solver: Arc<Solver>,
}

impl OptimalStrategy {
    pub fn new(instance: &GameInstance, player: Player) -> Result<Self, StrategyError> {
        let config = SolverConfig {
            parallel: false,
            ..SolverConfig::from_env()
        };
        Ok(OptimalStrategy {
            player,
            solver: Arc::new(Solver::new(instance, config)?),
        })
    }
}

impl Strategy for OptimalStrategy {
    fn name(&self) -> String {
        "optimal".into()
    }

    fn player(&self) -> Player {
        self.player
    }

    fn next_move(&mut self, state: &GameState) -> Result<Move, StrategyError> {
        if state.to_move() != self.player {
            return Err(StrategyError::Precondition(format!("{} is not to move", self.player)));
        }
        let result = self.solver.solve_position(state.assignment());
        result
            .principal_move
            .or_else(|| state.legal_moves().first().copied())
            .ok_or_else(|| StrategyError::Precondition("game is over".into()))
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}

/// Uniformly random legal moves from a seeded ChaCha8 stream.
#[derive(Clone)]
pub struct RandomStrategy {
    player: Player,
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomStrategy {
    pub fn new(player: Player, seed: u64) -> Self {
        RandomStrategy {
            player,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Strategy for RandomStrategy {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn player(&self) -> Player {
        self.player
    }

    fn next_move(&mut self, state: &GameState) -> Result<Move, StrategyError> {
        if state.to_move() != self.player {
            return Err(StrategyError::Precondition(format!("{} is not to move", self.player)));
        }
        let moves = state.legal_moves();
        if moves.is_empty() {
            return Err(StrategyError::Precondition("game is over".into()));
        }
        Ok(moves[self.rng.random_range(0..moves.len())])
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}
