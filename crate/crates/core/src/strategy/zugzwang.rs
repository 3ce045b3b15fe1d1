//! T's strategy for T-first, T-last games under the `(2/3)^w` potential.
//!
//! T keeps a working CNF `psi` over a pool `Y` of variables, and a second pool
//! `Z` of variables bound in pairs by XOR constraints. Before each normal
//! move, T sets aside every pair of literals in `Y` that satisfies the
//! zugzwang condition; those clauses are either dropped (guaranteed by the XOR)
//! or lose the pair's literals. A move by F inside `Z` is answered at once on
//! the partner variable so the XOR holds.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cnf::{Clause, Cnf, GameInstance, Literal, Move, Player, Var};
use crate::game::GameState;
use crate::potential::{cnf_potential, literal_potentials, oct_split, PotentialScheme};
use crate::quad::{rational, Quad};

use super::{AuditLog, Invariant, Strategy, StrategyError};

const SCHEME: PotentialScheme = PotentialScheme::ThreeHalves;
const SOUNDNESS_LIMIT: usize = 12;

/// `li XOR lj`, stored with the lower variable first and that literal positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct XorConstraint {
    li: Literal,
    lj: Literal,
}

impl XorConstraint {
    pub fn new(a: Literal, b: Literal) -> Option<Self> {
        if a.var() == b.var() {
            return None;
        }
        let (mut li, mut lj) = if a.var() < b.var() { (a, b) } else { (b, a) };
        if !li.is_positive() {
            li = li.negate();
            lj = lj.negate();
        }
        Some(XorConstraint { li, lj })
    }

    pub fn literals(&self) -> (Literal, Literal) {
        (self.li, self.lj)
    }

    pub fn mentions(&self, var: Var) -> bool {
        self.li.var() == var || self.lj.var() == var
    }

    pub fn holds(&self, value_of: impl Fn(Var) -> bool) -> bool {
        self.li.eval(value_of(self.li.var())) != self.lj.eval(value_of(self.lj.var()))
    }

    /// The bit for the other variable that makes the constraint hold, given
    /// `var = bit`.
    pub fn completion(&self, var: Var, bit: bool) -> Option<(Var, bool)> {
        let (played, other) = if self.li.var() == var {
            (self.li, self.lj)
        } else if self.lj.var() == var {
            (self.lj, self.li)
        } else {
            return None;
        };
        let want = !played.eval(bit);
        Some((other.var(), if other.is_positive() { want } else { !want }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("setting aside {li}, {lj} raised the potential from {before} to {after}")]
pub struct PotentialIncrease {
    pub li: Literal,
    pub lj: Literal,
    pub before: Quad,
    pub after: Quad,
}

/// The pair of literals on `Y` satisfying `a + e >= 5/4 (b + d) + 1/2 (c + f + g + h)`
/// in `psi`, scanning variable pairs `i < j` in order and trying `(xi, xj)`
/// before `(xi, !xj)`.
pub fn find_zugzwang(psi: &Cnf, y: &BTreeSet<Var>) -> Option<(Literal, Literal)> {
    let vars: Vec<Var> = y.iter().copied().collect();
    let five_quarters = rational(5, 4);
    let half = rational(1, 2);
    for (idx, &vi) in vars.iter().enumerate() {
        for &vj in &vars[idx + 1..] {
            for pj in [true, false] {
                let (li, lj) = (Literal::pos(vi), Literal::new(vj, pj));
                let s = oct_split(psi, li, lj, SCHEME).expect("distinct variables");
                let lhs = &s.a + &s.e;
                let rhs = (&s.b + &s.d).scale(&five_quarters) + (&(&(&s.c + &s.f) + &s.g) + &s.h).scale(&half);
                if lhs >= rhs {
                    return Some((li, lj));
                }
            }
        }
    }
    None
}

/// T's private view: the working CNF, the two variable pools and the XORs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZugzwangBook {
    pub psi: Cnf,
    pub y: BTreeSet<Var>,
    pub z: BTreeSet<Var>,
    pub zeta: BTreeSet<XorConstraint>,
}

impl ZugzwangBook {
    pub fn new(instance: &GameInstance) -> Self {
        ZugzwangBook {
            psi: instance.cnf().clone(),
            y: (0..instance.universe_size()).collect(),
            z: BTreeSet::new(),
            zeta: BTreeSet::new(),
        }
    }

    /// Moves the pair into `Z` under `li XOR lj`, drops the clauses containing
    /// both `li, lj` or both negations, and strips the pair from the rest. The
    /// book is updated even when the potential check fails.
    pub fn apply_zugzwang(&mut self, li: Literal, lj: Literal) -> Result<(), Box<PotentialIncrease>> {
        let before = cnf_potential(&self.psi, SCHEME);
        let (ni, nj) = (li.negate(), lj.negate());
        self.psi = self
            .psi
            .iter()
            .filter(|c| !(c.contains(li) && c.contains(lj)) && !(c.contains(ni) && c.contains(nj)))
            .map(|c| c.without_var(li.var()).without_var(lj.var()))
            .collect();
        self.y.remove(&li.var());
        self.y.remove(&lj.var());
        self.z.insert(li.var());
        self.z.insert(lj.var());
        self.zeta.insert(XorConstraint::new(li, lj).expect("distinct variables"));
        let after = cnf_potential(&self.psi, SCHEME);
        if after > before {
            Err(Box::new(PotentialIncrease { li, lj, before, after }))
        } else {
            Ok(())
        }
    }

    /// The literal on `Y` maximizing `p(lit) - p(!lit)`; ties go to the lowest
    /// variable, then the positive literal.
    pub fn normal_choice(&self, universe: u32) -> Option<Literal> {
        let pots = literal_potentials(&self.psi, universe, SCHEME);
        let mut best: Option<(Literal, Quad)> = None;
        for &var in &self.y {
            let [neg, pos] = &pots[var as usize];
            for (positive, gain) in [(true, pos - neg), (false, neg - pos)] {
                if best.as_ref().is_none_or(|(_, b)| gain > *b) {
                    best = Some((Literal::new(var, positive), gain));
                }
            }
        }
        best.map(|(lit, _)| lit)
    }

    /// Removes the constraint containing `var` and returns the bit for its
    /// partner that satisfies it.
    pub fn respond(&mut self, var: Var, bit: bool) -> Option<(Var, bool)> {
        let c = *self.zeta.iter().find(|c| c.mentions(var))?;
        let (other, value) = c.completion(var, bit)?;
        self.zeta.remove(&c);
        self.z.remove(&var);
        self.z.remove(&other);
        Some((other, value))
    }

    pub fn play_on_psi(&mut self, lit: Literal) {
        self.psi = self.psi.residual(lit);
        self.y.remove(&lit.var());
    }
}

fn holds_on(clause: &Clause, value_of: &impl Fn(Var) -> bool) -> bool {
    clause.literals().iter().any(|l| l.eval(value_of(l.var())))
}

fn cnf_holds(cnf: &Cnf, value_of: &impl Fn(Var) -> bool) -> bool {
    cnf.iter().all(|c| holds_on(c, value_of))
}

/// T's zugzwang strategy with run-time checks of its bookkeeping.
#[derive(Debug, Clone)]
pub struct TZugzwang {
    book: ZugzwangBook,
    universe: u32,
    below_one: bool,
    round: usize,
    before_normal: Option<Quad>,
    audit: AuditLog,
}

impl TZugzwang {
    pub fn new(instance: &GameInstance) -> Result<Self, StrategyError> {
        if instance.first() != Player::T || instance.last() != Player::T {
            return Err(StrategyError::Precondition(format!(
                "t-zugzwang needs T first and last, got {}",
                instance.pattern()
            )));
        }
        Ok(TZugzwang {
            book: ZugzwangBook::new(instance),
            universe: instance.universe_size(),
            below_one: cnf_potential(instance.cnf(), SCHEME) < Quad::one(),
            round: 0,
            before_normal: None,
            audit: AuditLog::default(),
        })
    }

    pub fn book(&self) -> &ZugzwangBook {
        &self.book
    }

    fn answering_zugzwang(&self, state: &GameState) -> Option<Move> {
        state
            .last_move()
            .copied()
            .filter(|mv| mv.player == Player::F && self.book.z.contains(&mv.var))
    }

    fn audit_boundary(&mut self, state: &GameState) {
        let round = self.round;
        let book = &self.book;
        let unplayed: BTreeSet<Var> = state.unplayed().collect();
        let union: BTreeSet<Var> = book.y.union(&book.z).copied().collect();
        let zeta_vars: BTreeSet<Var> = book
            .zeta
            .iter()
            .flat_map(|c| [c.li.var(), c.lj.var()])
            .collect();
        let partition = book.y.is_disjoint(&book.z)
            && union == unplayed
            && zeta_vars == book.z
            && book.zeta.len() * 2 == book.z.len()
            && book.psi.variables().is_subset(&book.y);
        self.audit.check(partition, round, Invariant::PoolPartition, || {
            format!(
                "Y={:?} Z={:?} unplayed={:?} psi vars={:?}",
                book.y,
                book.z,
                unplayed,
                book.psi.variables()
            )
        });

        if union.len() <= SOUNDNESS_LIMIT {
            let vars: Vec<Var> = union.iter().copied().collect();
            let mut bits = vec![false; self.universe as usize];
            let mut counterexample = None;
            for mask in 0u32..(1 << vars.len()) {
                for (i, &v) in vars.iter().enumerate() {
                    bits[v as usize] = mask >> i & 1 == 1;
                }
                let value_of = |v: Var| bits[v as usize];
                let premise = cnf_holds(&book.psi, &value_of) && book.zeta.iter().all(|c| c.holds(value_of));
                if premise && !cnf_holds(state.residual(), &value_of) {
                    counterexample = Some(mask);
                    break;
                }
            }
            self.audit.check(counterexample.is_none(), round, Invariant::Soundness, || {
                format!("extension {counterexample:?} over {vars:?} satisfies psi and zeta but not the residual")
            });
        }

        let now = cnf_potential(&book.psi, SCHEME);
        if self.below_one {
            self.audit.check(now < Quad::one(), round, Invariant::PotentialBelowOne, || {
                format!("p(psi) = {now}")
            });
        }
        if let Some(before) = self.before_normal.take() {
            self.audit.check(now <= before, round, Invariant::NormalRound, || {
                format!("potential rose from {before} to {now}")
            });
        }
    }
}

impl Strategy for TZugzwang {
    fn name(&self) -> String {
        "t-zugzwang".into()
    }

    fn player(&self) -> Player {
        Player::T
    }

    fn next_move(&mut self, state: &GameState) -> Result<Move, StrategyError> {
        if state.to_move() != Player::T {
            return Err(StrategyError::Precondition("T is not to move".into()));
        }
        if let Some(f_move) = self.answering_zugzwang(state) {
            let (var, value) = self
                .book
                .respond(f_move.var, f_move.value)
                .ok_or_else(|| StrategyError::Unreachable(format!("x{} has no XOR partner", f_move.var)))?;
            return Ok(Move::new(Player::T, var, value));
        }

        self.round += 1;
        self.audit_boundary(state);
        while let Some((li, lj)) = find_zugzwang(&self.book.psi, &self.book.y) {
            let result = self.book.apply_zugzwang(li, lj);
            self.audit.check(result.is_ok(), self.round, Invariant::SetAside, || {
                result.unwrap_err().to_string()
            });
        }
        let lit = self
            .book
            .normal_choice(self.universe)
            .ok_or_else(|| StrategyError::Unreachable("no variable left outside the XOR pool".into()))?;
        self.before_normal = Some(cnf_potential(&self.book.psi, SCHEME));
        self.book.play_on_psi(lit);
        Ok(Move::making_true(Player::T, lit))
    }

    fn observe(&mut self, _after: &GameState, mv: Move) {
        if mv.player == Player::F && self.book.y.contains(&mv.var) {
            self.book.play_on_psi(mv.literal());
        }
    }

    fn game_over(&mut self, state: &GameState) {
        let book = &self.book;
        let empty = book.y.is_empty() && book.z.is_empty() && book.zeta.is_empty();
        self.audit.check(empty, self.round, Invariant::PoolPartition, || {
            format!("pools not empty at the end: {book:?}")
        });
        if self.below_one {
            let done = book.psi.is_empty() && state.residual().is_empty();
            self.audit.check(done, self.round, Invariant::FinalResidualEmpty, || {
                format!("psi {} and residual {} remain", book.psi, state.residual())
            });
        }
    }

    fn box_clone(&self) -> Box<dyn Strategy> {
        Box::new(self.clone())
    }

    fn drain_audit(&mut self) -> AuditLog {
        std::mem::take(&mut self.audit)
    }

    fn working_cnf(&self) -> Option<&Cnf> {
        Some(&self.book.psi)
    }

    fn opens_round(&self, state: &GameState) -> bool {
        self.answering_zugzwang(state).is_none()
    }

    fn guaranteed_scheme(&self) -> Option<PotentialScheme> {
        Some(SCHEME)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(code: i64) -> Literal {
        Literal::from_dimacs(code).unwrap()
    }

    #[test]
    fn xor_canonical_form_and_completion() {
        let c = XorConstraint::new(lit(-3), lit(-1)).unwrap();
        assert_eq!(c.literals(), (lit(1), lit(3)));
        assert_eq!(c, XorConstraint::new(lit(1), lit(3)).unwrap());
        assert_eq!(c.completion(0, true), Some((2, false)));
        assert_eq!(c.completion(2, false), Some((0, true)));
        let d = XorConstraint::new(lit(2), lit(-4)).unwrap();
        assert_eq!(d.completion(1, true), Some((3, true)));
        assert!(d.holds(|v| v == 1 || v == 3));
        assert!(XorConstraint::new(lit(1), lit(-1)).is_none());
    }

    #[test]
    fn xor_pair_is_a_zugzwang() {
        let psi = Cnf::from_dimacs(&[&[1, 2], &[-1, -2]]).unwrap();
        let y: BTreeSet<Var> = [0, 1].into();
        assert_eq!(find_zugzwang(&psi, &y), Some((lit(1), lit(2))));
        let psi = Cnf::from_dimacs(&[&[1, -2], &[-1, 2]]).unwrap();
        assert_eq!(find_zugzwang(&psi, &y), Some((lit(1), lit(-2))));
    }

    #[test]
    fn lone_unit_clause_is_not_a_zugzwang() {
        let psi = Cnf::from_dimacs(&[&[1]]).unwrap();
        let y: BTreeSet<Var> = [0, 1].into();
        assert_eq!(find_zugzwang(&psi, &y), None);
    }

    #[test]
    fn set_aside_drops_and_strips() {
        let g = GameInstance::new(
            Cnf::from_dimacs(&[&[1, 2, 3], &[-1, -2, 3], &[1, -2, 3], &[3, 4]]).unwrap(),
            5,
            Player::T,
            Player::T,
        )
        .unwrap();
        let mut book = ZugzwangBook::new(&g);
        book.apply_zugzwang(lit(1), lit(2)).unwrap();
        assert_eq!(book.psi, Cnf::from_dimacs(&[&[3], &[3, 4]]).unwrap());
        assert_eq!(book.z, [0, 1].into());
        assert_eq!(book.respond(1, false), Some((0, true)));
        assert!(book.zeta.is_empty() && book.z.is_empty());
    }
}
