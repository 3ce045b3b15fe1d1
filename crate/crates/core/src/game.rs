//! Positions of a game in progress.

use std::sync::Arc;

use crate::cnf::{Assignment, CnfError, Cnf, Evaluation, GameInstance, Move, Player, Var};

/// The public state of a game: what has been played and the residual CNF.
#[derive(Debug, Clone)]
pub struct GameState {
    instance: Arc<GameInstance>,
    assignment: Assignment,
    residual: Cnf,
    moves: Vec<Move>,
}

impl GameState {
    pub fn new(instance: Arc<GameInstance>) -> Self {
        let assignment = Assignment::new(instance.universe_size());
        let residual = instance.cnf().clone();
        GameState {
            instance,
            assignment,
            residual,
            moves: Vec::new(),
        }
    }

    pub fn start(instance: &GameInstance) -> Self {
        GameState::new(Arc::new(instance.clone()))
    }

    pub fn instance(&self) -> &GameInstance {
        &self.instance
    }

    pub fn shared_instance(&self) -> &Arc<GameInstance> {
        &self.instance
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    /// The original CNF with every played literal applied.
    pub fn residual(&self) -> &Cnf {
        &self.residual
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn last_move(&self) -> Option<&Move> {
        self.moves.last()
    }

    pub fn to_move(&self) -> Player {
        self.instance.player_at(self.moves.len())
    }

    pub fn is_complete(&self) -> bool {
        self.moves.len() == self.instance.universe_size() as usize
    }

    pub fn is_unplayed(&self, var: Var) -> bool {
        var < self.instance.universe_size() && !self.assignment.is_assigned(var)
    }

    pub fn unplayed(&self) -> impl Iterator<Item = Var> + '_ {
        self.assignment.unassigned()
    }

    /// Every legal move, variables ascending and 1 before 0.
    pub fn legal_moves(&self) -> Vec<Move> {
        let player = self.to_move();
        self.unplayed()
            .flat_map(|v| [Move::new(player, v, true), Move::new(player, v, false)])
            .collect()
    }

    /// Winner if the residual already settles the game.
    pub fn decided(&self) -> Option<Player> {
        if self.residual.is_empty() {
            Some(Player::T)
        } else if self.residual.has_empty_clause() {
            Some(Player::F)
        } else {
            None
        }
    }

    /// Winner by evaluating the original CNF on the final assignment.
    pub fn winner(&self) -> Option<Player> {
        if !self.is_complete() {
            return None;
        }
        Some(match self.instance.cnf().evaluate(&self.assignment) {
            Evaluation::Satisfied => Player::T,
            _ => Player::F,
        })
    }

    pub fn check_move(&self, mv: Move) -> Result<(), CnfError> {
        if self.is_complete() {
            return Err(CnfError::GameOver);
        }
        let expected = self.to_move();
        if mv.player != expected {
            return Err(CnfError::WrongPlayer {
                expected,
                got: mv.player,
            });
        }
        if mv.var >= self.instance.universe_size() {
            return Err(CnfError::VariableOutOfRange {
                var: mv.var,
                universe: self.instance.universe_size(),
            });
        }
        if self.assignment.is_assigned(mv.var) {
            return Err(CnfError::AlreadyAssigned(mv.var));
        }
        Ok(())
    }

    pub fn play(&mut self, mv: Move) -> Result<(), CnfError> {
        self.check_move(mv)?;
        self.assignment.set(mv.var, mv.value)?;
        self.residual = self.residual.residual(mv.literal());
        self.moves.push(mv);
        Ok(())
    }

    pub fn after(&self, mv: Move) -> Result<GameState, CnfError> {
        let mut next = self.clone();
        next.play(mv)?;
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_xor_pairs;

    #[test]
    fn play_updates_residual_and_turn() {
        let g = build_xor_pairs(2).unwrap();
        let mut s = GameState::start(&g);
        assert_eq!(s.to_move(), Player::T);
        assert_eq!(s.legal_moves().len(), 4);
        s.play(Move::new(Player::T, 0, true)).unwrap();
        assert_eq!(s.to_move(), Player::F);
        assert_eq!(s.residual(), &Cnf::from_dimacs(&[&[-2]]).unwrap());
        assert!(s.play(Move::new(Player::T, 1, true)).is_err());
        assert!(s.play(Move::new(Player::F, 0, true)).is_err());
        s.play(Move::new(Player::F, 1, true)).unwrap();
        assert_eq!(s.decided(), Some(Player::F));
        assert_eq!(s.winner(), Some(Player::F));
        assert!(s.play(Move::new(Player::T, 0, true)).is_err());
    }
}
