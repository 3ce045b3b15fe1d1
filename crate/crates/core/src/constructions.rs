//! Generators for the small-clause instances where F wins, plus the two
//! first-move reductions that relate F-first and T-first games.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cnf::{Clause, Cnf, GameInstance, Literal, Player, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("width {0} must be even")]
    OddWidth(usize),
    #[error("width {0} must be odd")]
    EvenWidth(usize),
    #[error("instance must have {expected} moving first")]
    WrongFirstPlayer { expected: Player },
    #[error("instance is not uniform")]
    NotUniform,
    #[error("cannot remove a literal from width-0 clauses")]
    ZeroWidth,
    #[error("literal {0} is outside the universe")]
    OutOfRange(Literal),
}

/// The named constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Construction {
    /// Even width, F plays last: an OR of XOR pairs, expanded.
    XorPairs,
    /// Odd width, F plays last: two tagged copies of the XOR-pairs CNF.
    OddTf,
    /// T plays first and last: the Fibonacci-sized recursive CNF.
    FibTt,
}

impl Construction {
    pub const ALL: [Construction; 3] = [Construction::XorPairs, Construction::OddTf, Construction::FibTt];

    pub fn name(self) -> &'static str {
        match self {
            Construction::XorPairs => "xor-pairs",
            Construction::OddTf => "odd-tf",
            Construction::FibTt => "fib-tt",
        }
    }

    pub fn build(self, k: usize) -> Result<GameInstance, ConstructionError> {
        match self {
            Construction::XorPairs => build_xor_pairs(k),
            Construction::OddTf => build_odd_tf(k),
            Construction::FibTt => Ok(build_fib_tt(k)),
        }
    }

    /// Clause count of `build(k)` by the closed form.
    pub fn expected_clauses(self, k: usize) -> u64 {
        match self {
            Construction::XorPairs => 1 << (k / 2),
            Construction::OddTf => 1 << k.div_ceil(2),
            Construction::FibTt => fibonacci(k + 2),
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown construction `{s}` (expected xor-pairs, odd-tf or fib-tt)"))
    }
}

/// `Fib_0 = 0`, `Fib_1 = 1`.
pub fn fibonacci(n: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

fn extend(cnf: &Cnf, lits: &[Literal]) -> Cnf {
    cnf.iter()
        .map(|c| {
            lits.iter()
                .try_fold(c.clone(), |acc, &l| acc.with_literal(l))
                .expect("construction adds fresh variables only")
        })
        .collect()
}

fn xor_pairs_cnf(k: usize) -> Cnf {
    let pairs = k / 2;
    (0..1u64 << pairs)
        .map(|mask| {
            let lits = (0..pairs).flat_map(|p| {
                let positive = mask >> p & 1 == 0;
                let v = 2 * p as Var;
                [Literal::new(v, positive), Literal::new(v + 1, positive)]
            });
            Clause::new(lits.collect()).expect("pairs use distinct variables")
        })
        .collect()
}

/// `2^(k/2)` clauses of width `k` over `k` variables; clause `S` takes
/// `(!x ∨ !y)` for the pairs in `S` and `(x ∨ y)` for the rest. T first, F last.
/// Pair `p` is variables `2p` and `2p + 1`.
pub fn build_xor_pairs(k: usize) -> Result<GameInstance, ConstructionError> {
    if !k.is_multiple_of(2) {
        return Err(ConstructionError::OddWidth(k));
    }
    Ok(GameInstance::new(xor_pairs_cnf(k), k as u32, Player::T, Player::F).expect("even universe"))
}

/// The `(k-1)`-width XOR-pairs CNF copied twice, one copy extended by
/// variable `k-1`, the other by variable `k`. Universe of `k + 1` variables.
pub fn build_odd_tf(k: usize) -> Result<GameInstance, ConstructionError> {
    if k.is_multiple_of(2) {
        return Err(ConstructionError::EvenWidth(k));
    }
    let inner = xor_pairs_cnf(k - 1);
    let a = (k - 1) as Var;
    let mut cnf = extend(&inner, &[Literal::pos(a)]);
    for c in &extend(&inner, &[Literal::pos(a + 1)]) {
        cnf.push(c.clone());
    }
    Ok(GameInstance::new(cnf, (k + 1) as u32, Player::T, Player::F).expect("even universe"))
}

fn fib_cnf(k: usize) -> Cnf {
    match k {
        0 => Cnf::new(vec![Clause::empty()]),
        1 => Cnf::new(vec![
            Clause::new(vec![Literal::pos(0)]).unwrap(),
            Clause::new(vec![Literal::neg(0)]).unwrap(),
        ]),
        _ => {
            let tag = (2 * k - 3) as Var;
            let mut cnf = extend(&fib_cnf(k - 1), &[Literal::pos(tag)]);
            for c in &extend(&fib_cnf(k - 2), &[Literal::neg(tag), Literal::pos(tag + 1)]) {
                cnf.push(c.clone());
            }
            cnf
        }
    }
}

/// `Fib_{k+2}` clauses of width `k` over `x0..x_{2k-2}` (just `x0` for `k = 0`),
/// T first and last.
pub fn build_fib_tt(k: usize) -> GameInstance {
    let universe = if k == 0 { 1 } else { 2 * k as u32 - 1 };
    GameInstance::new(fib_cnf(k), universe, Player::T, Player::T).expect("odd universe")
}

/// Appends a fresh variable to the universe and to every clause (positively)
/// and hands the first move to F. F wins the result whenever F wins `g`, by
/// opening with the fresh variable set to 0.
pub fn add_universal_variable(g: &GameInstance) -> Result<GameInstance, ConstructionError> {
    if g.first() != Player::T {
        return Err(ConstructionError::WrongFirstPlayer { expected: Player::T });
    }
    let fresh = g.universe_size();
    let cnf = extend(g.cnf(), &[Literal::pos(fresh)]);
    Ok(GameInstance::new(cnf, fresh + 1, Player::F, g.last()).expect("parity flips with first player"))
}

/// Turns an F-first `k`-uniform instance into a T-first `(k-1)`-uniform one,
/// assuming F opens with `lit = 1`: clauses with `lit` go, `!lit` is stripped,
/// and every other clause loses its highest-indexed literal. The played
/// variable leaves the universe and higher variables shift down by one.
pub fn reduce_by_first_move(g: &GameInstance, lit: Literal) -> Result<GameInstance, ConstructionError> {
    if g.first() != Player::F {
        return Err(ConstructionError::WrongFirstPlayer { expected: Player::F });
    }
    if lit.var() >= g.universe_size() {
        return Err(ConstructionError::OutOfRange(lit));
    }
    if !g.cnf().is_empty() {
        match g.cnf().uniform_width() {
            None => return Err(ConstructionError::NotUniform),
            Some(0) => return Err(ConstructionError::ZeroWidth),
            Some(_) => {}
        }
    }
    let removed = lit.var();
    let shift = |l: Literal| {
        let v = l.var();
        Literal::new(if v > removed { v - 1 } else { v }, l.is_positive())
    };
    let cnf = g
        .cnf()
        .iter()
        .filter(|c| !c.contains(lit))
        .map(|c| {
            let shrunk = if c.mentions(removed) {
                c.without_var(removed)
            } else {
                c.without_var(c.max_var().expect("uniform width is at least 1"))
            };
            Clause::new(shrunk.literals().iter().copied().map(shift).collect()).expect("shift is injective")
        })
        .collect();
    Ok(GameInstance::new(cnf, g.universe_size() - 1, Player::T, g.last()).expect("parity flips with first player"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(clauses: &[&[i64]]) -> Cnf {
        Cnf::from_dimacs(clauses).unwrap()
    }

    #[test]
    fn xor_pairs_small() {
        let g = build_xor_pairs(2).unwrap();
        assert_eq!(g.cnf(), &cnf(&[&[1, 2], &[-1, -2]]));
        assert_eq!(g.universe_size(), 2);

        let g4 = build_xor_pairs(4).unwrap();
        assert_eq!(
            g4.cnf(),
            &cnf(&[&[1, 2, 3, 4], &[-1, -2, 3, 4], &[1, 2, -3, -4], &[-1, -2, -3, -4]])
        );

        let g0 = build_xor_pairs(0).unwrap();
        assert_eq!(g0.cnf(), &Cnf::new(vec![Clause::empty()]));
        assert_eq!(g0.universe_size(), 0);
        assert!(build_xor_pairs(3).is_err());
    }

    #[test]
    fn odd_tf_small() {
        let g1 = build_odd_tf(1).unwrap();
        assert_eq!(g1.cnf(), &cnf(&[&[1], &[2]]));
        assert_eq!(g1.universe_size(), 2);

        let g3 = build_odd_tf(3).unwrap();
        assert_eq!(g3.cnf(), &cnf(&[&[1, 2, 3], &[-1, -2, 3], &[1, 2, 4], &[-1, -2, 4]]));
        assert_eq!(g3.universe_size(), 4);
        assert_eq!(build_odd_tf(5).unwrap().cnf().len(), 8);
        assert!(build_odd_tf(2).is_err());
    }

    #[test]
    fn fib_tt_small() {
        assert_eq!(build_fib_tt(0).cnf(), &Cnf::new(vec![Clause::empty()]));
        assert_eq!(build_fib_tt(0).universe_size(), 1);
        assert_eq!(build_fib_tt(1).cnf(), &cnf(&[&[1], &[-1]]));
        // (x0|x1) & (!x0|x1) & (!x1|x2)
        assert_eq!(build_fib_tt(2).cnf(), &cnf(&[&[1, 2], &[-1, 2], &[-2, 3]]));
        assert_eq!(build_fib_tt(2).universe_size(), 3);
        let counts: Vec<usize> = (0..=8).map(|k| build_fib_tt(k).cnf().len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 8, 13, 21, 34, 55]);
    }

    #[test]
    fn fibonacci_numbers() {
        let v: Vec<u64> = (0..10).map(fibonacci).collect();
        assert_eq!(v, vec![0, 1, 1, 2, 3, 5, 8, 13, 21, 34]);
    }

    #[test]
    fn uniformity_and_parity_of_generators() {
        for k in 0..=10 {
            let mut outs = vec![build_fib_tt(k)];
            outs.extend(build_xor_pairs(k).ok());
            outs.extend(build_odd_tf(k).ok());
            for g in outs {
                assert!(g.cnf().validate_uniform(k).is_ok());
                assert!(g.pattern().admits_universe(g.universe_size()));
            }
        }
    }

    #[test]
    fn universal_variable() {
        let g = add_universal_variable(&build_xor_pairs(2).unwrap()).unwrap();
        assert_eq!(g.cnf(), &cnf(&[&[1, 2, 3], &[-1, -2, 3]]));
        assert_eq!(g.universe_size(), 3);
        assert_eq!(g.first(), Player::F);
        assert_eq!(g.last(), Player::F);

        let g0 = add_universal_variable(&build_xor_pairs(0).unwrap()).unwrap();
        assert_eq!(g0.cnf(), &cnf(&[&[1]]));
        assert_eq!(g0.first(), Player::F);
        assert!(add_universal_variable(&g0).is_err());
    }

    #[test]
    fn reduce_by_first_move_example() {
        // (x1 | x2) & (!x1 | x3) over x0..x3, F opens with x1 = 0.
        let g = GameInstance::new(cnf(&[&[2, 3], &[-2, 4]]), 4, Player::F, Player::T).unwrap();
        let r = reduce_by_first_move(&g, Literal::neg(1)).unwrap();
        // (!x1 | x3) is satisfied; (x1 | x2) loses x1 and x2 shifts to x1.
        assert_eq!(r.cnf(), &cnf(&[&[2]]));
        assert_eq!(r.universe_size(), 3);
        assert_eq!(r.first(), Player::T);
        assert_eq!(r.last(), Player::T);
    }

    #[test]
    fn reduce_drops_highest_literal_of_untouched_clauses() {
        let g = GameInstance::new(cnf(&[&[2, -3]]), 3, Player::F, Player::F).unwrap();
        let r = reduce_by_first_move(&g, Literal::pos(0)).unwrap();
        assert_eq!(r.cnf(), &cnf(&[&[1]]));
    }

    #[test]
    fn reduce_rejects_bad_inputs() {
        let t_first = build_xor_pairs(2).unwrap();
        assert!(reduce_by_first_move(&t_first, Literal::pos(0)).is_err());
        let zero = GameInstance::new(Cnf::new(vec![Clause::empty()]), 1, Player::F, Player::F).unwrap();
        assert_eq!(reduce_by_first_move(&zero, Literal::pos(0)), Err(ConstructionError::ZeroWidth));
        let mixed = GameInstance::new(cnf(&[&[1], &[1, 2]]), 3, Player::F, Player::F).unwrap();
        assert_eq!(reduce_by_first_move(&mixed, Literal::pos(0)), Err(ConstructionError::NotUniform));
    }
}
