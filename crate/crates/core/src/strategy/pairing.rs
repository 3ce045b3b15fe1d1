//! F's winning strategies for the extremal constructions.

use crate::cnf::{Move, Player, Var};
use crate::game::GameState;

use super::{Strategy, StrategyError};

fn t_reply_target(state: &GameState) -> Result<Move, StrategyError> {
    if state.to_move() != Player::F {
        return Err(StrategyError::Precondition("F is not to move".into()));
    }
    match state.last_move() {
        Some(mv) if mv.player == Player::T => Ok(*mv),
        _ => Err(StrategyError::Unreachable("F moves first or twice in a row".into())),
    }
}

fn answer(state: &GameState, var: Var, value: bool) -> Result<Move, StrategyError> {
    if state.is_unplayed(var) {
        Ok(Move::new(Player::F, var, value))
    } else {
        Err(StrategyError::Unreachable(format!("partner x{var} is not available")))
    }
}

/// Copies T's bit onto the partner of the variable T just played, where the
/// pairs are `(x0, x1), (x2, x3), ...`.
pub fn f_pairing_xor(state: &GameState) -> Result<Move, StrategyError> {
    let last = t_reply_target(state)?;
    answer(state, last.var ^ 1, last.value)
}

/// Pairing on all but the last two variables; on those two, F zeroes whichever
/// one T did not play.
pub fn f_odd_strategy(state: &GameState) -> Result<Move, StrategyError> {
    let last = t_reply_target(state)?;
    let n = state.instance().universe_size();
    if n < 2 {
        return Err(StrategyError::Precondition("universe too small".into()));
    }
    let (a, b) = (n - 2, n - 1);
    if last.var == a {
        answer(state, b, false)
    } else if last.var == b {
        answer(state, a, false)
    } else {
        answer(state, last.var ^ 1, last.value)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FPairing;

impl Strategy for FPairing {
    fn name(&self) -> String {
        "f-pairing".into()
    }

    fn player(&self) -> Player {
        Player::F
    }

    fn next_move(&mut self, state: &GameState) -> Result<Move, StrategyError> {
        f_pairing_xor(state)
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(*self)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FOdd;

impl Strategy for FOdd {
    fn name(&self) -> String {
        "f-odd".into()
    }

    fn player(&self) -> Player {
        Player::F
    }

    fn next_move(&mut self, state: &GameState) -> Result<Move, StrategyError> {
        f_odd_strategy(state)
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(*self)
    }
}

/// F's strategy for the Fibonacci family. Variables `x1..x_{2k-2}` form pairs
/// `(x_{2i-1}, x_{2i})`. When T enters a fresh pair, F zeroes the partner.
/// When T plays `x0`, or closes the pair F opened last, F opens the lowest
/// fresh pair by zeroing its lower variable.
#[derive(Debug, Clone, Default)]
pub struct FChase {
    open: Option<u32>,
}

impl FChase {
    pub fn new() -> Self {
        Self::default()
    }

    fn pair_of(var: Var) -> u32 {
        var.div_ceil(2)
    }

    fn open_fresh(&mut self, state: &GameState) -> Result<Move, StrategyError> {
        let n = state.instance().universe_size();
        let fresh = (1..=n / 2).find(|&i| state.is_unplayed(2 * i - 1) && state.is_unplayed(2 * i));
        match fresh {
            Some(i) => {
                self.open = Some(i);
                Ok(Move::new(Player::F, 2 * i - 1, false))
            }
            None => Err(StrategyError::Unreachable("no fresh pair left to open".into())),
        }
    }
}

impl Strategy for FChase {
    fn name(&self) -> String {
        "f-chase".into()
    }

    fn player(&self) -> Player {
        Player::F
    }

    fn next_move(&mut self, state: &GameState) -> Result<Move, StrategyError> {
        let last = t_reply_target(state)?;
        if last.var == 0 {
            return self.open_fresh(state);
        }
        let pair = Self::pair_of(last.var);
        if self.open == Some(pair) {
            return self.open_fresh(state);
        }
        let partner = if last.var % 2 == 1 { last.var + 1 } else { last.var - 1 };
        answer(state, partner, false)
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }
}
