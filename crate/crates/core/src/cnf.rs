//! Literals, clauses, CNFs and game instances.
//!
//! Variables are 0-indexed internally. A [`Clause`] keeps its literals sorted by
//! variable index and never mentions a variable twice. A [`Cnf`] is an ordered
//! multiset of clauses: duplicates are kept so that clause counts stay exact.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Not;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Variable index.
pub type Var = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("variable x{0} occurs more than once in a clause")]
    DuplicateVariable(Var),
    #[error("variable x{var} is outside the universe of size {universe}")]
    VariableOutOfRange { var: Var, universe: u32 },
    #[error("universe size {universe} has the wrong parity for first={first}, last={last}")]
    ParityMismatch {
        universe: u32,
        first: Player,
        last: Player,
    },
    #[error("variable x{0} is already assigned")]
    AlreadyAssigned(Var),
    #[error("it is {expected}'s turn, not {got}'s")]
    WrongPlayer { expected: Player, got: Player },
    #[error("no moves remain")]
    GameOver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Player {
    T,
    F,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::T => Player::F,
            Player::F => Player::T,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Player::T => 'T',
            Player::F => 'F',
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Player {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "T" | "t" => Ok(Player::T),
            "F" | "f" => Ok(Player::F),
            other => Err(format!("unknown player `{other}` (expected T or F)")),
        }
    }
}

/// Who moves first and who moves last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub first: Player,
    pub last: Player,
}

impl Pattern {
    pub const TT: Pattern = Pattern::new(Player::T, Player::T);
    pub const TF: Pattern = Pattern::new(Player::T, Player::F);
    pub const FT: Pattern = Pattern::new(Player::F, Player::T);
    pub const FF: Pattern = Pattern::new(Player::F, Player::F);

    pub const fn new(first: Player, last: Player) -> Self {
        Pattern { first, last }
    }

    /// Whether a universe of `n` variables is consistent with this pattern.
    pub fn admits_universe(self, n: u32) -> bool {
        (n % 2 == 1) == (self.first == self.last)
    }

    /// Smallest universe size `>= at_least` consistent with this pattern.
    pub fn smallest_universe(self, at_least: u32) -> u32 {
        if self.admits_universe(at_least) {
            at_least
        } else {
            at_least + 1
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.last)
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Pattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cleaned: String = s.chars().filter(|c| *c != '.' && *c != '·').collect();
        let mut chars = cleaned.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => Ok(Pattern::new(
                a.to_string().parse()?,
                b.to_string().parse()?,
            )),
            _ => Err(format!("bad pattern `{s}` (expected TT, TF, FT or FF)")),
        }
    }
}

/// A variable together with a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: Var,
    positive: bool,
}

impl Literal {
    pub const fn new(var: Var, positive: bool) -> Self {
        Literal { var, positive }
    }

    pub const fn pos(var: Var) -> Self {
        Literal::new(var, true)
    }

    pub const fn neg(var: Var) -> Self {
        Literal::new(var, false)
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negate(self) -> Self {
        Literal::new(self.var, !self.positive)
    }

    /// Truth value of the literal when its variable holds `bit`.
    pub fn eval(self, bit: bool) -> bool {
        bit == self.positive
    }

    /// Signed 1-indexed encoding used in files.
    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var) + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(code: i64) -> Option<Self> {
        if code == 0 {
            return None;
        }
        let var = Var::try_from(code.unsigned_abs() - 1).ok()?;
        Some(Literal::new(var, code > 0))
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        self.negate()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "!x{}", self.var)
        }
    }
}

/// A disjunction of literals over distinct variables, sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    pub fn new(mut lits: Vec<Literal>) -> Result<Self, CnfError> {
        lits.sort();
        for w in lits.windows(2) {
            if w[0].var == w[1].var {
                return Err(CnfError::DuplicateVariable(w[0].var));
            }
        }
        Ok(Clause { lits })
    }

    pub fn empty() -> Self {
        Clause::default()
    }

    pub fn width(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    /// The literal this clause holds on `var`, if any.
    pub fn literal_on(&self, var: Var) -> Option<Literal> {
        self.lits
            .binary_search_by_key(&var, |l| l.var)
            .ok()
            .map(|i| self.lits[i])
    }

    pub fn mentions(&self, var: Var) -> bool {
        self.literal_on(var).is_some()
    }

    /// Drops whatever literal the clause holds on `var`.
    pub fn without_var(&self, var: Var) -> Clause {
        Clause {
            lits: self.lits.iter().copied().filter(|l| l.var != var).collect(),
        }
    }

    /// Adds a literal on a variable the clause does not mention yet.
    pub fn with_literal(&self, lit: Literal) -> Result<Clause, CnfError> {
        let mut lits = self.lits.clone();
        lits.push(lit);
        Clause::new(lits)
    }

    pub fn max_var(&self) -> Option<Var> {
        self.lits.last().map(|l| l.var)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Outcome of evaluating a CNF under a (partial) assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Evaluation {
    Satisfied,
    Falsified,
    Undetermined,
}

/// A multiset of clauses in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Cnf {
    clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(clauses: Vec<Clause>) -> Self {
        Cnf { clauses }
    }

    /// Builds a CNF from signed 0-indexed literal codes: `v` is positive,
    /// `!v` is written as `-(v + 1)`. Mostly handy in tests.
    pub fn from_dimacs(clauses: &[&[i64]]) -> Result<Self, CnfError> {
        clauses
            .iter()
            .map(|c| Clause::new(c.iter().filter_map(|&x| Literal::from_dimacs(x)).collect()))
            .collect::<Result<Vec<_>, _>>()
            .map(Cnf::new)
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Clause> {
        self.clauses.iter()
    }

    pub fn push(&mut self, clause: Clause) {
        self.clauses.push(clause);
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.clauses
            .iter()
            .flat_map(|c| c.literals().iter().map(|l| l.var()))
            .collect()
    }

    pub fn max_var(&self) -> Option<Var> {
        self.clauses.iter().filter_map(Clause::max_var).max()
    }

    /// Same multiset, clauses sorted lexicographically.
    pub fn canonical(&self) -> Cnf {
        let mut clauses = self.clauses.clone();
        clauses.sort();
        Cnf { clauses }
    }

    /// Canonical form with repeated clauses collapsed.
    pub fn dedup(&self) -> Cnf {
        let mut c = self.canonical();
        c.clauses.dedup();
        c
    }

    /// `self[lit = 1]`: clauses containing `lit` vanish, `!lit` is stripped
    /// from the others.
    pub fn residual(&self, lit: Literal) -> Cnf {
        let neg = lit.negate();
        let clauses = self
            .clauses
            .iter()
            .filter(|c| !c.contains(lit))
            .map(|c| {
                if c.contains(neg) {
                    c.without_var(lit.var())
                } else {
                    c.clone()
                }
            })
            .collect();
        Cnf { clauses }
    }

    pub fn evaluate(&self, assignment: &Assignment) -> Evaluation {
        let mut all_satisfied = true;
        for clause in &self.clauses {
            let mut satisfied = false;
            let mut open = false;
            for lit in clause.literals() {
                match assignment.get(lit.var()) {
                    Some(bit) if lit.eval(bit) => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => open = true,
                }
            }
            if !satisfied {
                if !open {
                    return Evaluation::Falsified;
                }
                all_satisfied = false;
            }
        }
        if all_satisfied {
            Evaluation::Satisfied
        } else {
            Evaluation::Undetermined
        }
    }

    /// Checks that every clause has exactly `k` literals.
    pub fn validate_uniform(&self, k: usize) -> Result<(), UniformityViolation> {
        let offending: Vec<usize> = self
            .clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.width() != k)
            .map(|(i, _)| i)
            .collect();
        if offending.is_empty() {
            Ok(())
        } else {
            Err(UniformityViolation { k, offending })
        }
    }

    /// The common clause width, if all clauses share one. `None` for an empty CNF.
    pub fn uniform_width(&self) -> Option<usize> {
        let w = self.clauses.first()?.width();
        self.clauses.iter().all(|c| c.width() == w).then_some(w)
    }
}

impl<'a> IntoIterator for &'a Cnf {
    type Item = &'a Clause;
    type IntoIter = std::slice::Iter<'a, Clause>;

    fn into_iter(self) -> Self::IntoIter {
        self.clauses.iter()
    }
}

impl FromIterator<Clause> for Cnf {
    fn from_iter<I: IntoIterator<Item = Clause>>(iter: I) -> Self {
        Cnf::new(iter.into_iter().collect())
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "<empty>");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clauses {offending:?} do not have width {k}")]
pub struct UniformityViolation {
    pub k: usize,
    pub offending: Vec<usize>,
}

/// A CNF, the variable universe it is played over, and the turn pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameInstance {
    cnf: Cnf,
    universe_size: u32,
    first: Player,
    last: Player,
}

impl GameInstance {
    pub fn new(cnf: Cnf, universe_size: u32, first: Player, last: Player) -> Result<Self, CnfError> {
        if let Some(var) = cnf.max_var() {
            if var >= universe_size {
                return Err(CnfError::VariableOutOfRange {
                    var,
                    universe: universe_size,
                });
            }
        }
        if !Pattern::new(first, last).admits_universe(universe_size) {
            return Err(CnfError::ParityMismatch {
                universe: universe_size,
                first,
                last,
            });
        }
        Ok(GameInstance {
            cnf,
            universe_size,
            first,
            last,
        })
    }

    pub fn with_pattern(cnf: Cnf, universe_size: u32, pattern: Pattern) -> Result<Self, CnfError> {
        GameInstance::new(cnf, universe_size, pattern.first, pattern.last)
    }

    pub fn cnf(&self) -> &Cnf {
        &self.cnf
    }

    pub fn universe_size(&self) -> u32 {
        self.universe_size
    }

    pub fn first(&self) -> Player {
        self.first
    }

    pub fn last(&self) -> Player {
        self.last
    }

    pub fn pattern(&self) -> Pattern {
        Pattern::new(self.first, self.last)
    }

    /// Whose turn it is after `moves_played` moves.
    pub fn player_at(&self, moves_played: usize) -> Player {
        if moves_played.is_multiple_of(2) {
            self.first
        } else {
            self.first.opponent()
        }
    }

    /// Variables of the universe that no clause mentions.
    pub fn padding_variables(&self) -> Vec<Var> {
        let used = self.cnf.variables();
        (0..self.universe_size).filter(|v| !used.contains(v)).collect()
    }

    /// Removes unused variables in pairs (keeping one when their number is odd)
    /// and renumbers the rest densely. The turn pattern is unchanged.
    ///
    /// A pair of unused variables is a pair of passes: whoever wins the smaller
    /// game answers a pass with the other pass, so the winner is preserved.
    pub fn prune_padding(&self) -> GameInstance {
        let padding = self.padding_variables();
        let keep_one = padding.len() % 2 == 1;
        let dropped: BTreeSet<Var> = padding.iter().copied().skip(usize::from(keep_one)).collect();
        let mut remap = vec![None; self.universe_size as usize];
        let mut next = 0;
        for v in 0..self.universe_size {
            if !dropped.contains(&v) {
                remap[v as usize] = Some(next);
                next += 1;
            }
        }
        let cnf = self
            .cnf
            .iter()
            .map(|c| {
                Clause::new(
                    c.literals()
                        .iter()
                        .map(|l| Literal::new(remap[l.var() as usize].expect("used variable"), l.is_positive()))
                        .collect(),
                )
                .expect("renumbering keeps variables distinct")
            })
            .collect();
        GameInstance::new(cnf, next, self.first, self.last).expect("pairs removed keep parity")
    }
}

/// A partial map from variables to bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new(universe_size: u32) -> Self {
        Assignment {
            values: vec![None; universe_size as usize],
        }
    }

    pub fn universe_size(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.values.get(var as usize).copied().flatten()
    }

    pub fn is_assigned(&self, var: Var) -> bool {
        self.get(var).is_some()
    }

    pub fn set(&mut self, var: Var, bit: bool) -> Result<(), CnfError> {
        let universe = self.universe_size();
        match self.values.get_mut(var as usize) {
            None => Err(CnfError::VariableOutOfRange { var, universe }),
            Some(Some(_)) => Err(CnfError::AlreadyAssigned(var)),
            Some(slot) => {
                *slot = Some(bit);
                Ok(())
            }
        }
    }

    pub fn assigned_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn unassigned(&self) -> impl Iterator<Item = Var> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(i, _)| i as Var)
    }
}

/// One turn: `player` sets `var` to `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Move {
    pub player: Player,
    pub var: Var,
    pub value: bool,
}

impl Move {
    pub fn new(player: Player, var: Var, value: bool) -> Self {
        Move { player, var, value }
    }

    /// Plays `lit = 1`.
    pub fn making_true(player: Player, lit: Literal) -> Self {
        Move::new(player, lit.var(), lit.is_positive())
    }

    /// The literal this move makes true.
    pub fn literal(&self) -> Literal {
        Literal::new(self.var, self.value)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:x{}={}", self.player, self.var, u8::from(self.value))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranscriptError {
    #[error("move {index} is by {got}, expected {expected}")]
    OutOfTurn { index: usize, expected: Player, got: Player },
    #[error("move {index} replays variable x{var}")]
    Replayed { index: usize, var: Var },
    #[error("move {index} uses x{var}, outside the universe")]
    OutOfRange { index: usize, var: Var },
    #[error("transcript has {got} moves, universe has {expected} variables")]
    Incomplete { expected: u32, got: usize },
    #[error("recorded winner {recorded} disagrees with the final assignment ({actual})")]
    WrongWinner { recorded: Player, actual: Player },
}

/// A completed game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub instance: GameInstance,
    pub moves: Vec<Move>,
    pub winner: Player,
}

impl Transcript {
    /// Checks alternation, uniqueness, completeness and the winner.
    pub fn check(&self) -> Result<(), TranscriptError> {
        let mut assignment = Assignment::new(self.instance.universe_size());
        for (index, mv) in self.moves.iter().enumerate() {
            let expected = self.instance.player_at(index);
            if mv.player != expected {
                return Err(TranscriptError::OutOfTurn {
                    index,
                    expected,
                    got: mv.player,
                });
            }
            match assignment.set(mv.var, mv.value) {
                Ok(()) => {}
                Err(CnfError::AlreadyAssigned(var)) => return Err(TranscriptError::Replayed { index, var }),
                Err(_) => return Err(TranscriptError::OutOfRange { index, var: mv.var }),
            }
        }
        if !assignment.is_total() {
            return Err(TranscriptError::Incomplete {
                expected: self.instance.universe_size(),
                got: self.moves.len(),
            });
        }
        let actual = match self.instance.cnf().evaluate(&assignment) {
            Evaluation::Satisfied => Player::T,
            _ => Player::F,
        };
        if actual != self.winner {
            return Err(TranscriptError::WrongWinner {
                recorded: self.winner,
                actual,
            });
        }
        Ok(())
    }
}
