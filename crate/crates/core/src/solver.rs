//! Exact game solving by exhaustive search.
//!
//! Positions are keyed by the partial assignment alone: whose turn it is
//! follows from how many variables are set. Clauses are compiled to pairs of
//! bit masks so that a position evaluates with a few word operations per clause.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Assignment, Clause, Cnf, CnfError, Evaluation, GameInstance, Literal, Move, Pattern, Player, Var};
use crate::game::GameState;
use crate::strategy::{AuditLog, Strategy, StrategyError};

pub const DEFAULT_SOLVE_LIMIT: u32 = 14;
pub const DEFAULT_BEST_RESPONSE_LIMIT: u32 = 20;
pub const SOLVE_LIMIT_ENV: &str = "CNFGAME_SOLVE_LIMIT";
/// Hard ceiling imposed by the 64-bit position encoding.
pub const MAX_UNIVERSE: u32 = 64;
/// Largest number of instances [`enumerate_instances`] will produce.
pub const ENUMERATION_CAP: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("universe size {universe} exceeds the limit of {limit}")]
    LimitExceeded { universe: u32, limit: u32 },
    #[error("{strategy} made an illegal move {mv} after [{}]: {reason}", format_prefix(.prefix))]
    IllegalMove {
        strategy: String,
        mv: Move,
        prefix: Vec<Move>,
        reason: CnfError,
    },
    #[error("{strategy} failed after [{}]: {source}", format_prefix(.prefix))]
    Strategy {
        strategy: String,
        prefix: Vec<Move>,
        source: StrategyError,
    },
}

fn format_prefix(moves: &[Move]) -> String {
    moves.iter().map(Move::to_string).join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub limit: u32,
    pub memoize: bool,
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            limit: DEFAULT_SOLVE_LIMIT,
            memoize: true,
            parallel: false,
        }
    }
}

impl SolverConfig {
    /// Defaults, with the limit taken from `CNFGAME_SOLVE_LIMIT` when set.
    pub fn from_env() -> Self {
        let limit = std::env::var(SOLVE_LIMIT_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_SOLVE_LIMIT);
        SolverConfig {
            limit,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub winner: Player,
    /// First winning move for the player to move, else their first legal move.
    /// `None` once every variable is assigned.
    pub principal_move: Option<Move>,
    pub nodes_explored: u64,
}

/// A partial assignment: bit `v` of `set` marks `v` assigned, bit `v` of
/// `value` holds its bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PositionKey(u128);

impl PositionKey {
    pub fn new(set: u64, value: u64) -> Self {
        PositionKey(u128::from(set) | u128::from(value & set) << 64)
    }

    pub fn from_assignment(a: &Assignment) -> Self {
        let (mut set, mut value) = (0u64, 0u64);
        for v in 0..a.universe_size() {
            if let Some(bit) = a.get(v) {
                set |= 1 << v;
                value |= u64::from(bit) << v;
            }
        }
        PositionKey::new(set, value)
    }

    pub fn set(self) -> u64 {
        self.0 as u64
    }

    pub fn value(self) -> u64 {
        (self.0 >> 64) as u64
    }
}

#[derive(Debug, Clone)]
struct PackedCnf {
    clauses: Vec<(u64, u64)>,
}

impl PackedCnf {
    fn new(cnf: &Cnf) -> Self {
        let clauses = cnf
            .iter()
            .map(|c| {
                c.literals().iter().fold((0u64, 0u64), |(p, n), l| {
                    if l.is_positive() {
                        (p | 1 << l.var(), n)
                    } else {
                        (p, n | 1 << l.var())
                    }
                })
            })
            .collect();
        PackedCnf { clauses }
    }

    fn status(&self, set: u64, value: u64) -> Evaluation {
        let mut open = false;
        for &(pos, neg) in &self.clauses {
            if (pos & set & value) | (neg & set & !value) != 0 {
                continue;
            }
            if (pos | neg) & !set == 0 {
                return Evaluation::Falsified;
            }
            open = true;
        }
        if open {
            Evaluation::Undetermined
        } else {
            Evaluation::Satisfied
        }
    }
}

/// Exhaustive solver for one instance. Safe to share between threads; the
/// memo table persists across queries.
pub struct Solver {
    instance: Arc<GameInstance>,
    packed: PackedCnf,
    config: SolverConfig,
    memo: DashMap<PositionKey, bool>,
    nodes: AtomicU64,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver")
            .field("universe", &self.instance.universe_size())
            .field("config", &self.config)
            .field("memo_entries", &self.memo.len())
            .finish()
    }
}

impl Solver {
    pub fn new(instance: &GameInstance, config: SolverConfig) -> Result<Self, SolveError> {
        let limit = config.limit.min(MAX_UNIVERSE);
        if instance.universe_size() > limit {
            return Err(SolveError::LimitExceeded {
                universe: instance.universe_size(),
                limit,
            });
        }
        Ok(Solver {
            instance: Arc::new(instance.clone()),
            packed: PackedCnf::new(instance.cnf()),
            config,
            memo: DashMap::new(),
            nodes: AtomicU64::new(0),
        })
    }

    pub fn instance(&self) -> &GameInstance {
        &self.instance
    }

    pub fn solve_root(&self) -> SolveResult {
        self.solve_key(PositionKey::new(0, 0))
    }

    pub fn solve_position(&self, assignment: &Assignment) -> SolveResult {
        self.solve_key(PositionKey::from_assignment(assignment))
    }

    fn children(&self, set: u64) -> Vec<(Var, bool)> {
        (0..self.instance.universe_size())
            .filter(|v| set >> v & 1 == 0)
            .flat_map(|v| [(v, true), (v, false)])
            .collect()
    }

    fn mover(&self, set: u64) -> Player {
        self.instance.player_at(set.count_ones() as usize)
    }

    pub fn solve_key(&self, key: PositionKey) -> SolveResult {
        let start = self.nodes.load(Ordering::Relaxed);
        let (set, value) = (key.set(), key.value());
        let children = self.children(set);
        if children.is_empty() {
            let t_wins = self.t_wins(set, value);
            return SolveResult {
                winner: if t_wins { Player::T } else { Player::F },
                principal_move: None,
                nodes_explored: self.nodes.load(Ordering::Relaxed) - start,
            };
        }
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let mover = self.mover(set);
        let good_for_mover = |&(v, b): &(Var, bool)| {
            let t = self.t_wins(set | 1 << v, value | u64::from(b) << v);
            t == (mover == Player::T)
        };
        let winning = if self.config.parallel {
            let outcomes: Vec<bool> = children.par_iter().map(good_for_mover).collect();
            outcomes.iter().position(|&w| w)
        } else {
            children.iter().position(good_for_mover)
        };
        let (v, b) = children[winning.unwrap_or(0)];
        SolveResult {
            winner: if winning.is_some() { mover } else { mover.opponent() },
            principal_move: Some(Move::new(mover, v, b)),
            nodes_explored: self.nodes.load(Ordering::Relaxed) - start,
        }
    }

    fn t_wins(&self, set: u64, value: u64) -> bool {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        match self.packed.status(set, value) {
            Evaluation::Satisfied => return true,
            Evaluation::Falsified => return false,
            Evaluation::Undetermined => {}
        }
        let key = PositionKey::new(set, value);
        if self.config.memoize {
            if let Some(hit) = self.memo.get(&key) {
                return *hit;
            }
        }
        let want = self.mover(set) == Player::T;
        let mut result = !want;
        for v in 0..self.instance.universe_size() {
            if set >> v & 1 == 1 {
                continue;
            }
            let (s, bit) = (set | 1 << v, 1u64 << v);
            if self.t_wins(s, value | bit) == want || self.t_wins(s, value & !bit) == want {
                result = want;
                break;
            }
        }
        if self.config.memoize {
            self.memo.insert(key, result);
        }
        result
    }
}

pub fn solve(g: &GameInstance) -> Result<SolveResult, SolveError> {
    solve_with(g, SolverConfig::from_env())
}

pub fn solve_with(g: &GameInstance, config: SolverConfig) -> Result<SolveResult, SolveError> {
    Ok(Solver::new(g, config)?.solve_root())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BestResponseConfig {
    pub limit: u32,
    /// Stop at positions whose residual already decides the game. Turn off to
    /// play every line to the end so that end-of-game audits run.
    pub early_exit: bool,
}

impl Default for BestResponseConfig {
    fn default() -> Self {
        BestResponseConfig {
            limit: DEFAULT_BEST_RESPONSE_LIMIT,
            early_exit: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BestResponse {
    pub result: SolveResult,
    /// Everything the fixed strategy reported across the explored tree.
    pub audit: AuditLog,
    pub games_completed: u64,
}

struct Explorer {
    fixed_player: Player,
    early_exit: bool,
    nodes: u64,
    games: u64,
    audit: AuditLog,
}

impl Explorer {
    fn fixed_move(&mut self, state: &GameState, strat: &mut Box<dyn Strategy>) -> Result<(Move, GameState), SolveError> {
        let mv = strat.next_move(state).map_err(|source| SolveError::Strategy {
            strategy: strat.name(),
            prefix: state.moves().to_vec(),
            source,
        });
        self.audit.absorb(strat.drain_audit());
        let mv = mv?;
        let next = state.after(mv).map_err(|reason| SolveError::IllegalMove {
            strategy: strat.name(),
            mv,
            prefix: state.moves().to_vec(),
            reason,
        })?;
        strat.observe(&next, mv);
        self.audit.absorb(strat.drain_audit());
        Ok((mv, next))
    }

    fn opponent_child(&mut self, state: &GameState, mv: Move, strat: &dyn Strategy) -> (GameState, Box<dyn Strategy>) {
        let next = state.after(mv).expect("legal move");
        let mut s = strat.box_clone();
        s.observe(&next, mv);
        self.audit.absorb(s.drain_audit());
        (next, s)
    }

    /// Whether the fixed player wins from `state`.
    fn explore(&mut self, state: GameState, mut strat: Box<dyn Strategy>) -> Result<bool, SolveError> {
        self.nodes += 1;
        if state.is_complete() {
            strat.game_over(&state);
            self.audit.absorb(strat.drain_audit());
            self.games += 1;
            return Ok(state.winner() == Some(self.fixed_player));
        }
        if self.early_exit {
            if let Some(w) = state.decided() {
                return Ok(w == self.fixed_player);
            }
        }
        if state.to_move() == self.fixed_player {
            let (_, next) = self.fixed_move(&state, &mut strat)?;
            return self.explore(next, strat);
        }
        for mv in state.legal_moves() {
            let (next, s) = self.opponent_child(&state, mv, strat.as_ref());
            if !self.explore(next, s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Plays `fixed` for `fixed_player` against every possible opponent line.
/// The strategy is cloned at each opponent branch, so it may keep state.
pub fn best_response(
    g: &GameInstance,
    fixed: Box<dyn Strategy>,
    fixed_player: Player,
    config: BestResponseConfig,
) -> Result<BestResponse, SolveError> {
    let limit = config.limit.min(MAX_UNIVERSE);
    if g.universe_size() > limit {
        return Err(SolveError::LimitExceeded {
            universe: g.universe_size(),
            limit,
        });
    }
    let mut ex = Explorer {
        fixed_player,
        early_exit: config.early_exit,
        nodes: 0,
        games: 0,
        audit: AuditLog::default(),
    };
    let state = GameState::start(g);
    let mut strat = fixed;
    let (fixed_wins, principal) = if state.is_complete() {
        (ex.explore(state, strat)?, None)
    } else if state.to_move() == fixed_player {
        ex.nodes += 1;
        let (mv, next) = ex.fixed_move(&state, &mut strat)?;
        (ex.explore(next, strat)?, Some(mv))
    } else {
        ex.nodes += 1;
        let moves = state.legal_moves();
        let mut refutation = None;
        for &mv in &moves {
            let (next, s) = ex.opponent_child(&state, mv, strat.as_ref());
            if !ex.explore(next, s)? {
                refutation = Some(mv);
                break;
            }
        }
        (refutation.is_none(), Some(refutation.unwrap_or(moves[0])))
    };
    Ok(BestResponse {
        result: SolveResult {
            winner: if fixed_wins { fixed_player } else { fixed_player.opponent() },
            principal_move: principal,
            nodes_explored: ex.nodes,
        },
        audit: ex.audit,
        games_completed: ex.games,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("width {k} exceeds universe size {n}")]
    WidthTooLarge { k: usize, n: u32 },
    #[error("universe size {n} does not fit pattern {pattern}")]
    Parity { n: u32, pattern: Pattern },
    #[error("{count} instances exceed the enumeration cap of {cap}")]
    TooMany { count: u128, cap: u128 },
}

pub fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Every distinct `k`-literal clause over `n` variables, in canonical order.
pub fn all_clauses(k: usize, n: u32) -> Vec<Clause> {
    let mut out: Vec<Clause> = (0..n)
        .combinations(k)
        .flat_map(|vars| {
            (0u32..1 << k).map(move |mask| {
                let lits = vars
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| Literal::new(v, mask >> i & 1 == 0))
                    .collect();
                Clause::new(lits).expect("distinct variables")
            })
        })
        .collect();
    out.sort();
    out
}

/// Number of instances [`enumerate_instances`] would produce.
pub fn enumeration_count(k: usize, m: usize, n: u32) -> Option<u128> {
    let distinct = binomial(u128::from(n), k as u128)?.checked_mul(1u128.checked_shl(k as u32)?)?;
    binomial(distinct, m as u128)
}

/// All sets of `m` distinct `k`-uniform clauses over `n` variables, each in
/// canonical order, wrapped with `pattern`.
pub fn enumerate_instances(
    k: usize,
    m: usize,
    n: u32,
    pattern: Pattern,
) -> Result<impl Iterator<Item = GameInstance>, EnumerationError> {
    if k as u64 > u64::from(n) {
        return Err(EnumerationError::WidthTooLarge { k, n });
    }
    if !pattern.admits_universe(n) {
        return Err(EnumerationError::Parity { n, pattern });
    }
    let count = enumeration_count(k, m, n).unwrap_or(u128::MAX);
    if count > ENUMERATION_CAP {
        return Err(EnumerationError::TooMany {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    let clauses = all_clauses(k, n);
    Ok(clauses.into_iter().combinations(m).map(move |cs| {
        GameInstance::with_pattern(Cnf::new(cs), n, pattern).expect("checked parity")
    }))
}
