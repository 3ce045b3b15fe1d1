//! Match runner, construction verifier, random instances and bound sweeps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cnf::{Clause, Cnf, CnfError, GameInstance, Literal, Move, Pattern, Player, Transcript};
use crate::constructions::{Construction, ConstructionError};
use crate::format::serialize_instance;
use crate::game::GameState;
use crate::potential::{cnf_potential, PotentialScheme};
use crate::quad::Quad;
use crate::solver::{
    best_response, binomial, enumerate_instances, enumeration_count, BestResponseConfig, EnumerationError, SolveError,
};
use crate::strategy::{AuditFailure, AuditLog, Invariant, Strategy, StrategyError, StrategySpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("cannot set up {player}: {source}")]
    Setup { player: Player, source: StrategyError },
    #[error("{name} ({player}) failed after [{}]: {source}", moves_text(.prefix))]
    Strategy {
        player: Player,
        name: String,
        prefix: Vec<Move>,
        source: StrategyError,
    },
    #[error("{name} ({player}) played illegal move {mv} after [{}]: {reason}", moves_text(.prefix))]
    IllegalMove {
        player: Player,
        name: String,
        mv: Move,
        prefix: Vec<Move>,
        reason: CnfError,
    },
}

fn moves_text(moves: &[Move]) -> String {
    moves.iter().map(Move::to_string).collect::<Vec<_>>().join(" ")
}

fn transcript_json<S: Serializer>(t: &Transcript, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct View<'a> {
        instance: String,
        winner: Player,
        moves: &'a [Move],
    }
    View {
        instance: serialize_instance(&t.instance),
        winner: t.winner,
        moves: &t.moves,
    }
    .serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundPotential {
    pub round: usize,
    pub scheme: PotentialScheme,
    pub potential: Quad,
    pub approx: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub t_strategy: String,
    pub f_strategy: String,
    pub winner: Player,
    #[serde(serialize_with = "transcript_json")]
    pub transcript: Transcript,
    pub audit_scheme: Option<PotentialScheme>,
    pub per_round_potentials: Vec<RoundPotential>,
    pub audit_checks: u64,
    pub checks_by_invariant: BTreeMap<Invariant, u64>,
    pub audit_failures: Vec<AuditFailure>,
}

impl MatchReport {
    pub fn is_clean(&self) -> bool {
        self.audit_failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "match t={} f={} winner={}", self.t_strategy, self.f_strategy, self.winner).unwrap();
        writeln!(out, "moves {}", moves_text(&self.transcript.moves)).unwrap();
        for r in &self.per_round_potentials {
            writeln!(out, "round {} {} p={} (~{:.6})", r.round, r.scheme, r.potential, r.approx).unwrap();
        }
        writeln!(out, "audit checks={} failures={}", self.audit_checks, self.audit_failures.len()).unwrap();
        for f in &self.audit_failures {
            writeln!(out, "failure round={} invariant={} {}", f.round, f.invariant, f.detail).unwrap();
        }
        out
    }
}

/// Plays `t` against `f` to the end. With `audit` set, records the potential
/// at every round boundary (before a T move that opens a round, and at the end
/// if the last round completed) and flags increases when `audit` is the scheme
/// T's strategy is built around.
pub fn run_match(
    g: &GameInstance,
    t: Box<dyn Strategy>,
    f: Box<dyn Strategy>,
    audit: Option<PotentialScheme>,
) -> Result<MatchReport, MatchError> {
    for (player, s) in [(Player::T, &t), (Player::F, &f)] {
        if s.player() != player {
            return Err(MatchError::Setup {
                player,
                source: StrategyError::WrongPlayer {
                    name: s.name(),
                    expected: s.player(),
                    got: player,
                },
            });
        }
    }
    let (t_name, f_name) = (t.name(), f.name());
    let guaranteed = audit.is_some() && t.guaranteed_scheme() == audit;
    let mut seats = [t, f];
    let seat = |p: Player| usize::from(p == Player::F);
    let mut log = AuditLog::default();
    let mut potentials: Vec<RoundPotential> = Vec::new();
    let mut state = GameState::start(g);
    let mut last_t_opened = true;

    let record = |state: &GameState, t: &dyn Strategy, log: &mut AuditLog, potentials: &mut Vec<RoundPotential>| {
        let Some(scheme) = audit else { return };
        let cnf = match t.working_cnf() {
            Some(w) if guaranteed => w,
            _ => state.residual(),
        };
        let p = cnf_potential(cnf, scheme);
        let round = potentials.len() + 1;
        if guaranteed {
            if let Some(prev) = potentials.last() {
                log.check(p <= prev.potential, round, Invariant::RecordedRound, || {
                    format!("potential rose from {} to {}", prev.potential, p)
                });
            }
        }
        potentials.push(RoundPotential {
            round,
            scheme,
            approx: p.to_f64(),
            potential: p,
        });
    };

    while !state.is_complete() {
        let player = state.to_move();
        if player == Player::T {
            last_t_opened = seats[0].opens_round(&state);
            if last_t_opened {
                record(&state, seats[0].as_ref(), &mut log, &mut potentials);
            }
        }
        let s = &mut seats[seat(player)];
        let mv = s.next_move(&state).map_err(|source| MatchError::Strategy {
            player,
            name: s.name(),
            prefix: state.moves().to_vec(),
            source,
        })?;
        state.play(mv).map_err(|reason| MatchError::IllegalMove {
            player,
            name: s.name(),
            mv,
            prefix: state.moves().to_vec(),
            reason,
        })?;
        for s in &mut seats {
            s.observe(&state, mv);
            log.absorb(s.drain_audit());
        }
    }
    let round_closed = match state.last_move() {
        Some(mv) => mv.player == Player::F || !last_t_opened,
        None => false,
    };
    if round_closed {
        record(&state, seats[0].as_ref(), &mut log, &mut potentials);
    }
    for s in &mut seats {
        s.game_over(&state);
        log.absorb(s.drain_audit());
    }
    let winner = state.winner().expect("game complete");
    Ok(MatchReport {
        t_strategy: t_name,
        f_strategy: f_name,
        winner,
        transcript: Transcript {
            instance: g.clone(),
            moves: state.moves().to_vec(),
            winner,
        },
        audit_scheme: audit,
        per_round_potentials: potentials,
        audit_checks: log.checks,
        checks_by_invariant: log.per_invariant,
        audit_failures: log.failures,
    })
}

pub fn run_match_specs(
    g: &GameInstance,
    t: StrategySpec,
    f: StrategySpec,
    audit: Option<PotentialScheme>,
) -> Result<MatchReport, MatchError> {
    let build = |spec: StrategySpec, player| {
        spec.build(g, player)
            .map_err(|source| MatchError::Setup { player, source })
    };
    run_match(g, build(t, Player::T)?, build(f, Player::F)?, audit)
}

/// The F strategy that defeats a construction.
pub fn construction_strategy(c: Construction) -> StrategySpec {
    match c {
        Construction::XorPairs => StrategySpec::FPairing,
        Construction::OddTf => StrategySpec::FOdd,
        Construction::FibTt => StrategySpec::FChase,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionReport {
    pub construction: String,
    pub k: usize,
    pub universe_size: u32,
    pub pattern: Pattern,
    pub clauses: usize,
    pub expected_clauses: u64,
    pub uniform: bool,
    pub clause_count_ok: bool,
    pub f_strategy: String,
    pub winner: Player,
    pub nodes_explored: u64,
    pub audit_checks: u64,
    pub audit_failures: Vec<AuditFailure>,
    pub passed: bool,
}

impl ConstructionReport {
    pub fn to_text(&self) -> String {
        format!(
            "verify {} k={} universe={} pattern={} clauses={} expected={} uniform={} count_ok={} \
             winner={} (F fixed to {}, {} nodes) {}\n",
            self.construction,
            self.k,
            self.universe_size,
            self.pattern,
            self.clauses,
            self.expected_clauses,
            self.uniform,
            self.clause_count_ok,
            self.winner,
            self.f_strategy,
            self.nodes_explored,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Builds the construction and checks uniformity, the clause count, and that
/// its F strategy beats every T line.
pub fn verify_construction(c: Construction, k: usize) -> Result<ConstructionReport, VerifyError> {
    let g = c.build(k)?;
    let spec = construction_strategy(c);
    let f = spec.build(&g, Player::F)?;
    let config = BestResponseConfig {
        early_exit: false,
        ..BestResponseConfig::default()
    };
    let br = best_response(&g, f, Player::F, config)?;
    let uniform = g.cnf().validate_uniform(k).is_ok();
    let expected = c.expected_clauses(k);
    let clause_count_ok = g.cnf().len() as u64 == expected;
    let passed = uniform && clause_count_ok && br.result.winner == Player::F && br.audit.is_clean();
    Ok(ConstructionReport {
        construction: c.name().to_string(),
        k,
        universe_size: g.universe_size(),
        pattern: g.pattern(),
        clauses: g.cnf().len(),
        expected_clauses: expected,
        uniform,
        clause_count_ok,
        f_strategy: spec.to_string(),
        winner: br.result.winner,
        nodes_explored: br.result.nodes_explored,
        audit_checks: br.audit.checks,
        audit_failures: br.audit.failures,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RandomSpec {
    pub k: usize,
    pub m: usize,
    pub n: u32,
    pub pattern: Pattern,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RandomError {
    #[error("width {k} exceeds universe size {n}")]
    WidthTooLarge { k: usize, n: u32 },
    #[error("universe size {n} does not fit pattern {pattern}")]
    Parity { n: u32, pattern: Pattern },
    #[error("{m} clauses requested but only {distinct} distinct {k}-clauses exist over {n} variables")]
    TooManyClauses { k: usize, m: usize, n: u32, distinct: u128 },
    #[error("bad random spec: {0}")]
    Parse(String),
}

impl FromStr for RandomSpec {
    type Err = RandomError;

    /// `k=3,m=3,n=7,pattern=TT,seed=5`; `seed` defaults to 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: String| RandomError::Parse(msg);
        let (mut k, mut m, mut n, mut pattern, mut seed) = (None, None, None, None, 0u64);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("`{part}` is not key=value")))?;
            let num = |v: &str| v.parse::<u64>().map_err(|_| bad(format!("`{v}` is not a number")));
            match key.trim() {
                "k" => k = Some(num(value)? as usize),
                "m" => m = Some(num(value)? as usize),
                "n" => n = Some(u32::try_from(num(value)?).map_err(|_| bad("n too large".into()))?),
                "pattern" => pattern = Some(value.parse::<Pattern>().map_err(bad)?),
                "seed" => seed = num(value)?,
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        Ok(RandomSpec {
            k: k.ok_or_else(|| bad("missing k".into()))?,
            m: m.ok_or_else(|| bad("missing m".into()))?,
            n: n.ok_or_else(|| bad("missing n".into()))?,
            pattern: pattern.ok_or_else(|| bad("missing pattern".into()))?,
            seed,
        })
    }
}

/// `m` distinct clauses, each on a uniform `k`-subset of the variables with
/// uniform polarities, drawn from ChaCha8 seeded with `spec.seed`.
pub fn random_instance(spec: RandomSpec) -> Result<GameInstance, RandomError> {
    let RandomSpec { k, m, n, pattern, seed } = spec;
    if k as u64 > u64::from(n) {
        return Err(RandomError::WidthTooLarge { k, n });
    }
    if !pattern.admits_universe(n) {
        return Err(RandomError::Parity { n, pattern });
    }
    let distinct = binomial(u128::from(n), k as u128)
        .and_then(|b| b.checked_mul(1u128.checked_shl(k as u32)?))
        .unwrap_or(u128::MAX);
    if m as u128 > distinct {
        return Err(RandomError::TooManyClauses { k, m, n, distinct });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut clauses = Vec::with_capacity(m);
    while clauses.len() < m {
        let lits = sample(&mut rng, n as usize, k)
            .into_iter()
            .map(|v| Literal::new(v as u32, rng.random::<bool>()))
            .collect();
        let clause = Clause::new(lits).expect("sampled variables are distinct");
        if seen.insert(clause.clone()) {
            clauses.push(clause);
        }
    }
    Ok(GameInstance::with_pattern(Cnf::new(clauses), n, pattern).expect("checked parity"))
}

/// Above this many enumerated instances a sweep uses random instances only.
pub const SWEEP_ENUMERATION_LIMIT: u128 = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepSpec {
    pub k: usize,
    pub pattern: Pattern,
    pub scheme: PotentialScheme,
    pub clauses: usize,
    /// Random instances per extra universe size.
    pub seeds: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("{clauses} clauses of width {k} have potential {potential} under {scheme}, not below 1")]
    NotBelowThreshold {
        k: usize,
        clauses: usize,
        scheme: PotentialScheme,
        potential: Box<Quad>,
    },
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Random(#[from] RandomError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CorpusEntry {
    Enumerated { n: u32, index: usize },
    Random { n: u32, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub entry: CorpusEntry,
    pub instance: String,
    pub winner: Option<Player>,
    pub error: Option<String>,
    pub audit_failures: Vec<AuditFailure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub k: usize,
    pub pattern: Pattern,
    pub scheme: PotentialScheme,
    pub clauses: usize,
    pub t_strategy: String,
    pub initial_potential: Quad,
    pub enumerated: usize,
    pub random: usize,
    pub total: usize,
    pub wins: usize,
    pub audit_checks: u64,
    pub checks_by_invariant: BTreeMap<Invariant, u64>,
    pub audit_failure_count: usize,
    pub counterexamples: Vec<Counterexample>,
    pub passed: bool,
}

impl SweepSummary {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "sweep k={} pattern={} scheme={} clauses={} t={} p0={} corpus={} (enumerated {}, random {}) \
             wins={}/{} audit checks={} failures={} {}\n",
            self.k,
            self.pattern,
            self.scheme,
            self.clauses,
            self.t_strategy,
            self.initial_potential,
            self.total,
            self.enumerated,
            self.random,
            self.wins,
            self.total,
            self.audit_checks,
            self.audit_failure_count,
            if self.passed { "PASS" } else { "FAIL" }
        );
        for (inv, n) in &self.checks_by_invariant {
            writeln!(out, "  checked {inv}: {n}").unwrap();
        }
        for c in &self.counterexamples {
            writeln!(out, "counterexample {:?} winner={:?} error={:?}", c.entry, c.winner, c.error).unwrap();
            for f in &c.audit_failures {
                writeln!(out, "  failure round={} invariant={} {}", f.round, f.invariant, f.detail).unwrap();
            }
            for line in c.instance.lines() {
                writeln!(out, "  {line}").unwrap();
            }
        }
        out
    }
}

/// Instances a sweep runs on: every instance at the smallest admissible
/// universe (when few enough), then `seeds` random ones at each of the next
/// two admissible universe sizes.
pub fn sweep_corpus(spec: &SweepSpec) -> Result<Vec<(CorpusEntry, GameInstance)>, SweepError> {
    let n0 = spec.pattern.smallest_universe(spec.k as u32);
    let mut corpus = Vec::new();
    if enumeration_count(spec.k, spec.clauses, n0).is_some_and(|c| c <= SWEEP_ENUMERATION_LIMIT) {
        for (index, g) in enumerate_instances(spec.k, spec.clauses, n0, spec.pattern)?.enumerate() {
            corpus.push((CorpusEntry::Enumerated { n: n0, index }, g));
        }
    }
    for n in [n0 + 2, n0 + 4] {
        for seed in 0..spec.seeds {
            let g = random_instance(RandomSpec {
                k: spec.k,
                m: spec.clauses,
                n,
                pattern: spec.pattern,
                seed,
            })?;
            corpus.push((CorpusEntry::Random { n, seed }, g));
        }
    }
    Ok(corpus)
}

/// Runs the T strategy built on `spec.scheme` against exhaustive F on every
/// corpus instance, with all audits on and every line played to the end.
/// Winner and audit of one corpus game, or why it could not be played.
type Outcome = Result<(Player, AuditLog), String>;

pub fn sweep_bound(spec: &SweepSpec) -> Result<SweepSummary, SweepError> {
    let p0 = &Quad::from_ratio(spec.clauses as i64, 1) * &spec.scheme.weight(spec.k);
    if p0 >= Quad::one() {
        return Err(SweepError::NotBelowThreshold {
            k: spec.k,
            clauses: spec.clauses,
            scheme: spec.scheme,
            potential: Box::new(p0),
        });
    }
    let t_spec = StrategySpec::t_strategy_for(spec.scheme);
    let corpus = sweep_corpus(spec)?;
    if let Some((_, g)) = corpus.first() {
        t_spec.build(g, Player::T)?;
    }
    let config = BestResponseConfig {
        early_exit: false,
        ..BestResponseConfig::default()
    };
    let outcomes: Vec<(CorpusEntry, Outcome, &GameInstance)> = corpus
        .par_iter()
        .map(|(entry, g)| {
            let outcome = t_spec
                .build(g, Player::T)
                .map_err(|e| e.to_string())
                .and_then(|t| best_response(g, t, Player::T, config).map_err(|e| e.to_string()))
                .map(|br| (br.result.winner, br.audit));
            (*entry, outcome, g)
        })
        .collect();

    let mut wins = 0;
    let mut checks = 0;
    let mut by_invariant: BTreeMap<Invariant, u64> = BTreeMap::new();
    let mut failure_count = 0;
    let mut counterexamples = Vec::new();
    for (entry, outcome, g) in outcomes {
        let (winner, error, failures) = match outcome {
            Ok((w, audit)) => {
                checks += audit.checks;
                for (inv, n) in audit.per_invariant {
                    *by_invariant.entry(inv).or_default() += n;
                }
                (Some(w), None, audit.failures)
            }
            Err(e) => (None, Some(e), Vec::new()),
        };
        failure_count += failures.len();
        if winner == Some(Player::T) {
            wins += 1;
        }
        if winner != Some(Player::T) || !failures.is_empty() {
            counterexamples.push(Counterexample {
                entry,
                instance: serialize_instance(g),
                winner,
                error,
                audit_failures: failures,
            });
        }
    }
    let enumerated = corpus
        .iter()
        .filter(|(e, _)| matches!(e, CorpusEntry::Enumerated { .. }))
        .count();
    Ok(SweepSummary {
        k: spec.k,
        pattern: spec.pattern,
        scheme: spec.scheme,
        clauses: spec.clauses,
        t_strategy: t_spec.to_string(),
        initial_potential: p0,
        enumerated,
        random: corpus.len() - enumerated,
        total: corpus.len(),
        wins,
        audit_checks: checks,
        checks_by_invariant: by_invariant,
        audit_failure_count: failure_count,
        passed: wins == corpus.len() && failure_count == 0,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_fib_tt, build_xor_pairs};
    use crate::solver::solve;

    #[test]
    fn fib_two_optimal_t_vs_chase() {
        let g = build_fib_tt(2);
        let r = run_match_specs(&g, StrategySpec::Optimal, StrategySpec::FChase, None).unwrap();
        assert_eq!(r.winner, Player::F);
    }

    #[test]
    fn xor_pairs_greedy_vs_pairing_is_f_win_with_clean_audit() {
        let g = build_xor_pairs(2).unwrap();
        let r = run_match_specs(
            &g,
            StrategySpec::TGreedy(PotentialScheme::Sqrt2),
            StrategySpec::FPairing,
            Some(PotentialScheme::Sqrt2),
        )
        .unwrap();
        assert_eq!(r.winner, Player::F);
        assert!(r.is_clean(), "{}", r.to_text());
        assert_eq!(r.per_round_potentials.len(), 2);
    }

    #[test]
    fn optimal_vs_optimal_matches_solver() {
        for seed in 0..10 {
            let g = random_instance(RandomSpec {
                k: 2,
                m: 3,
                n: 4,
                pattern: Pattern::TF,
                seed,
            })
            .unwrap();
            let r = run_match_specs(&g, StrategySpec::Optimal, StrategySpec::Optimal, None).unwrap();
            assert_eq!(r.winner, solve(&g).unwrap().winner);
        }
    }

    #[test]
    fn random_spec_parsing_and_determinism() {
        let spec: RandomSpec = "k=2,m=1,n=2,pattern=TF,seed=7".parse().unwrap();
        assert_eq!(random_instance(spec).unwrap(), random_instance(spec).unwrap());
        let g = random_instance("k=4,m=3,n=8,pattern=TF".parse().unwrap()).unwrap();
        assert_eq!(g.cnf().len(), 3);
        assert!(g.cnf().validate_uniform(4).is_ok());
        assert!(matches!(
            random_instance("k=1,m=3,n=1,pattern=TT".parse().unwrap()),
            Err(RandomError::TooManyClauses { .. })
        ));
        assert!("k=1,m=1,pattern=TT".parse::<RandomSpec>().is_err());
    }

    #[test]
    fn verify_small_constructions() {
        for (c, k) in [(Construction::XorPairs, 2), (Construction::OddTf, 1), (Construction::FibTt, 2)] {
            let r = verify_construction(c, k).unwrap();
            assert!(r.passed, "{}", r.to_text());
        }
    }

    #[test]
    fn sweep_rejects_at_threshold() {
        let spec = SweepSpec {
            k: 2,
            pattern: Pattern::TF,
            scheme: PotentialScheme::Sqrt2,
            clauses: 2,
            seeds: 1,
        };
        assert!(matches!(sweep_bound(&spec), Err(SweepError::NotBelowThreshold { .. })));
    }

    #[test]
    fn small_zugzwang_sweep_passes() {
        let spec = SweepSpec {
            k: 2,
            pattern: Pattern::TT,
            scheme: PotentialScheme::ThreeHalves,
            clauses: 2,
            seeds: 5,
        };
        let s = sweep_bound(&spec).unwrap();
        assert!(s.passed, "{}", s.to_text());
    }
}
