//! Strategies for both players and the audit records they emit.
//!
//! A [`Strategy`] is asked for a move whenever its player is to move, and is
//! shown every move (its own included) through [`Strategy::observe`]. T's
//! potential strategies check their own invariants as they go and report the
//! results through [`Strategy::drain_audit`].

mod baseline;
mod greedy;
mod pairing;
mod zugzwang;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Cnf, GameInstance, Move, Player};
use crate::game::GameState;
use crate::potential::PotentialScheme;
use crate::solver::SolveError;

pub use baseline::{OptimalStrategy, RandomStrategy};
pub use greedy::{t_greedy, TGreedy};
pub use pairing::{f_odd_strategy, f_pairing_xor, FChase, FOdd, FPairing};
pub use zugzwang::{find_zugzwang, PotentialIncrease, TZugzwang, XorConstraint, ZugzwangBook};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("position is not reachable under this strategy: {0}")]
    Unreachable(String),
    #[error("strategy `{name}` plays for {expected}, not {got}")]
    WrongPlayer { name: String, expected: Player, got: Player },
    #[error("{0}")]
    Precondition(String),
    #[error("solver: {0}")]
    Solver(String),
}

impl From<SolveError> for StrategyError {
    fn from(e: SolveError) -> Self {
        StrategyError::Solver(e.to_string())
    }
}

/// Invariants checked at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Invariant {
    /// A T-move-then-F-move round does not raise the potential of the residual.
    GreedyRound,
    /// Setting a zugzwang pair aside does not raise the potential.
    SetAside,
    /// A normal round taken when no zugzwang pair exists does not raise the potential.
    NormalRound,
    /// The unplayed variables split into the normal pool and the zugzwang pool.
    PoolPartition,
    /// Satisfying the working CNF and the XOR constraints satisfies the original.
    Soundness,
    /// The working potential stays below 1.
    PotentialBelowOne,
    /// Below the clause threshold, T's strategy ends with nothing left unsatisfied.
    FinalResidualEmpty,
    /// The potential recorded by the match runner rose between round boundaries.
    RecordedRound,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::GreedyRound => "greedy-round",
            Invariant::SetAside => "set-aside",
            Invariant::NormalRound => "normal-round",
            Invariant::PoolPartition => "pool-partition",
            Invariant::Soundness => "soundness",
            Invariant::PotentialBelowOne => "potential-below-one",
            Invariant::FinalResidualEmpty => "final-residual-empty",
            Invariant::RecordedRound => "recorded-round",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditFailure {
    pub round: usize,
    pub invariant: Invariant,
    pub detail: String,
}

/// Checks performed and failures found since the last drain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AuditLog {
    pub checks: u64,
    pub per_invariant: BTreeMap<Invariant, u64>,
    pub failures: Vec<AuditFailure>,
}

impl AuditLog {
    pub fn check(&mut self, ok: bool, round: usize, invariant: Invariant, detail: impl FnOnce() -> String) {
        self.checks += 1;
        *self.per_invariant.entry(invariant).or_default() += 1;
        if !ok {
            self.failures.push(AuditFailure {
                round,
                invariant,
                detail: detail(),
            });
        }
    }

    pub fn absorb(&mut self, other: AuditLog) {
        self.checks += other.checks;
        for (inv, n) in other.per_invariant {
            *self.per_invariant.entry(inv).or_default() += n;
        }
        self.failures.extend(other.failures);
    }

    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

pub trait Strategy: Send {
    fn name(&self) -> String;

    fn player(&self) -> Player;

    fn next_move(&mut self, state: &GameState) -> Result<Move, StrategyError>;

    /// Called after every move, by either player, with the resulting state.
    fn observe(&mut self, _after: &GameState, _mv: Move) {}

    /// Called once when all variables are assigned.
    fn game_over(&mut self, _state: &GameState) {}

    fn box_clone(&self) -> Box<dyn Strategy>;

    fn drain_audit(&mut self) -> AuditLog {
        AuditLog::default()
    }

    /// The CNF the strategy tracks, when it differs from the plain residual.
    fn working_cnf(&self) -> Option<&Cnf> {
        None
    }

    /// Whether the upcoming move starts a new round for potential accounting.
    fn opens_round(&self, _state: &GameState) -> bool {
        true
    }

    /// The scheme under which this strategy never lets a round raise the potential.
    fn guaranteed_scheme(&self) -> Option<PotentialScheme> {
        None
    }
}

impl Clone for Box<dyn Strategy> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

fn check_player(name: &str, expected: Player, got: Player) -> Result<(), StrategyError> {
    if expected == got {
        Ok(())
    } else {
        Err(StrategyError::WrongPlayer {
            name: name.to_string(),
            expected,
            got,
        })
    }
}

/// Strategy identifiers as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategySpec {
    FPairing,
    FOdd,
    FChase,
    TGreedy(PotentialScheme),
    TZugzwang,
    Optimal,
    Random(u64),
}

impl StrategySpec {
    pub fn build(self, instance: &GameInstance, player: Player) -> Result<Box<dyn Strategy>, StrategyError> {
        let name = self.to_string();
        Ok(match self {
            StrategySpec::FPairing => {
                check_player(&name, Player::F, player)?;
                Box::new(FPairing)
            }
            StrategySpec::FOdd => {
                check_player(&name, Player::F, player)?;
                Box::new(FOdd)
            }
            StrategySpec::FChase => {
                check_player(&name, Player::F, player)?;
                Box::new(FChase::new())
            }
            StrategySpec::TGreedy(scheme) => {
                check_player(&name, Player::T, player)?;
                Box::new(TGreedy::new(instance, scheme))
            }
            StrategySpec::TZugzwang => {
                check_player(&name, Player::T, player)?;
                Box::new(TZugzwang::new(instance)?)
            }
            StrategySpec::Optimal => Box::new(OptimalStrategy::new(instance, player)?),
            StrategySpec::Random(seed) => Box::new(RandomStrategy::new(player, seed)),
        })
    }

    /// The T strategy whose round guarantee uses `scheme`.
    pub fn t_strategy_for(scheme: PotentialScheme) -> StrategySpec {
        match scheme {
            PotentialScheme::Sqrt2 | PotentialScheme::Parity => StrategySpec::TGreedy(scheme),
            PotentialScheme::ThreeHalves => StrategySpec::TZugzwang,
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::FPairing => f.write_str("f-pairing"),
            StrategySpec::FOdd => f.write_str("f-odd"),
            StrategySpec::FChase => f.write_str("f-chase"),
            StrategySpec::TGreedy(PotentialScheme::Sqrt2) => f.write_str("t-greedy-sqrt2"),
            StrategySpec::TGreedy(PotentialScheme::Parity) => f.write_str("t-greedy-parity"),
            StrategySpec::TGreedy(s) => write!(f, "t-greedy-{s}"),
            StrategySpec::TZugzwang => f.write_str("t-zugzwang"),
            StrategySpec::Optimal => f.write_str("optimal"),
            StrategySpec::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "f-pairing" => StrategySpec::FPairing,
            "f-odd" => StrategySpec::FOdd,
            "f-chase" => StrategySpec::FChase,
            "t-greedy-sqrt2" => StrategySpec::TGreedy(PotentialScheme::Sqrt2),
            "t-greedy-parity" => StrategySpec::TGreedy(PotentialScheme::Parity),
            "t-zugzwang" => StrategySpec::TZugzwang,
            "optimal" => StrategySpec::Optimal,
            other => match other.strip_prefix("random:") {
                Some(seed) => StrategySpec::Random(
                    seed.parse()
                        .map_err(|_| format!("bad seed in `{other}`"))?,
                ),
                None => return Err(format!("unknown strategy `{other}`")),
            },
        })
    }
}
