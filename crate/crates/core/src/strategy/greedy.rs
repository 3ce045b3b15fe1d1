//! T plays the literal carrying the most potential.

use crate::cnf::{GameInstance, Literal, Move, Player};
use crate::game::GameState;
use crate::potential::{cnf_potential, literal_potentials, PotentialScheme};
use crate::quad::Quad;

use super::{AuditLog, Invariant, Strategy, StrategyError};

/// The literal of an unplayed variable maximizing `p(residual, lit)`; ties go to
/// the lowest variable, then to the positive literal.
pub fn t_greedy(state: &GameState, scheme: PotentialScheme) -> Result<Move, StrategyError> {
    if state.to_move() != Player::T {
        return Err(StrategyError::Precondition("T is not to move".into()));
    }
    let pots = literal_potentials(state.residual(), state.instance().universe_size(), scheme);
    let mut best: Option<(Literal, &Quad)> = None;
    for var in state.unplayed() {
        for positive in [true, false] {
            let p = &pots[var as usize][usize::from(positive)];
            if best.is_none_or(|(_, b)| p > b) {
                best = Some((Literal::new(var, positive), p));
            }
        }
    }
    best.map(|(lit, _)| Move::making_true(Player::T, lit))
        .ok_or_else(|| StrategyError::Precondition("no unplayed variable".into()))
}

/// [`t_greedy`] with a per-round audit: the potential of the residual after
/// F's reply must not exceed its value before T's move.
#[derive(Debug, Clone)]
pub struct TGreedy {
    scheme: PotentialScheme,
    below_one: bool,
    round: usize,
    round_start: Option<Quad>,
    audit: AuditLog,
}

impl TGreedy {
    pub fn new(instance: &GameInstance, scheme: PotentialScheme) -> Self {
        TGreedy {
            scheme,
            below_one: cnf_potential(instance.cnf(), scheme) < Quad::one(),
            round: 0,
            round_start: None,
            audit: AuditLog::default(),
        }
    }
}

impl Strategy for TGreedy {
    fn name(&self) -> String {
        super::StrategySpec::TGreedy(self.scheme).to_string()
    }

    fn player(&self) -> Player {
        Player::T
    }

    fn next_move(&mut self, state: &GameState) -> Result<Move, StrategyError> {
        let mv = t_greedy(state, self.scheme)?;
        self.round += 1;
        self.round_start = Some(cnf_potential(state.residual(), self.scheme));
        Ok(mv)
    }

    fn observe(&mut self, after: &GameState, mv: Move) {
        if mv.player != Player::F {
            return;
        }
        if let Some(before) = self.round_start.take() {
            let now = cnf_potential(after.residual(), self.scheme);
            self.audit.check(now <= before, self.round, Invariant::GreedyRound, || {
                format!("potential rose from {before} to {now}")
            });
        }
    }

    fn game_over(&mut self, state: &GameState) {
        if self.below_one {
            self.audit.check(state.residual().is_empty(), self.round, Invariant::FinalResidualEmpty, || {
                format!("residual {} remains", state.residual())
            });
        }
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }

    fn drain_audit(&mut self) -> AuditLog {
        std::mem::take(&mut self.audit)
    }

    fn guaranteed_scheme(&self) -> Option<PotentialScheme> {
        Some(self.scheme)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Cnf;

    #[test]
    fn picks_heaviest_literal_with_tiebreaks() {
        let cnf = Cnf::from_dimacs(&[&[1, 2], &[-3]]).unwrap();
        let g = GameInstance::new(cnf, 3, Player::T, Player::T).unwrap();
        let s = GameState::start(&g);
        assert_eq!(t_greedy(&s, PotentialScheme::Sqrt2).unwrap(), Move::new(Player::T, 2, false));
        let tied = GameInstance::new(Cnf::from_dimacs(&[&[1, 2], &[-1, -2]]).unwrap(), 3, Player::T, Player::T).unwrap();
        let s = GameState::start(&tied);
        assert_eq!(t_greedy(&s, PotentialScheme::Sqrt2).unwrap(), Move::new(Player::T, 0, true));
    }

    #[test]
    fn no_literal_mentioned_plays_lowest_var_true() {
        let g = GameInstance::new(Cnf::new(vec![]), 2, Player::T, Player::F).unwrap();
        let s = GameState::start(&g);
        assert_eq!(t_greedy(&s, PotentialScheme::Parity).unwrap(), Move::new(Player::T, 0, true));
    }
}
