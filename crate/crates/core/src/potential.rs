//! Clause weights and the potential bookkeeping used by T's strategies.
//!
//! A scheme assigns each clause a weight that depends only on its width; the
//! potential of a CNF is the sum over its clauses (duplicates counted), and the
//! potential of a literal is the sum over the clauses containing it.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Clause, Cnf, Literal};
use crate::quad::{Quad, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialScheme {
    /// `√2^-w`.
    Sqrt2,
    /// `√2^-w` for even `w`, `(2/3)·√2^-(w-1)` for odd `w`.
    Parity,
    /// `1.5^-w`.
    ThreeHalves,
}

impl PotentialScheme {
    pub const ALL: [PotentialScheme; 3] = [
        PotentialScheme::Sqrt2,
        PotentialScheme::Parity,
        PotentialScheme::ThreeHalves,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PotentialScheme::Sqrt2 => "sqrt2",
            PotentialScheme::Parity => "parity",
            PotentialScheme::ThreeHalves => "three-halves",
        }
    }

    /// Weight of a clause of the given width.
    pub fn weight(self, width: usize) -> Quad {
        const CACHED: usize = 65;
        static TABLES: OnceLock<[Vec<Quad>; 3]> = OnceLock::new();
        if width >= CACHED {
            return self.compute_weight(width);
        }
        let tables = TABLES.get_or_init(|| {
            PotentialScheme::ALL.map(|s| (0..CACHED).map(|w| s.compute_weight(w)).collect())
        });
        tables[self as usize][width].clone()
    }

    fn compute_weight(self, width: usize) -> Quad {
        let w = u32::try_from(width).expect("clause width fits in u32");
        let half_pow = |e: u32| Rational::new(BigInt::one(), BigInt::from(2).pow(e));
        match self {
            PotentialScheme::Sqrt2 if w % 2 == 0 => Quad::from_rational(half_pow(w / 2)),
            // √2^-w = √2 / 2^((w+1)/2)
            PotentialScheme::Sqrt2 => Quad::new(Rational::default(), half_pow(w.div_ceil(2))),
            PotentialScheme::Parity if w % 2 == 0 => Quad::from_rational(half_pow(w / 2)),
            PotentialScheme::Parity => {
                Quad::from_rational(half_pow((w - 1) / 2) * Rational::new(BigInt::from(2), BigInt::from(3)))
            }
            PotentialScheme::ThreeHalves => Quad::from_rational(Rational::new(
                BigInt::from(2).pow(w),
                BigInt::from(3).pow(w),
            )),
        }
    }
}

impl fmt::Display for PotentialScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sqrt2" => Ok(PotentialScheme::Sqrt2),
            "parity" => Ok(PotentialScheme::Parity),
            "three-halves" | "three_halves" | "1.5" => Ok(PotentialScheme::ThreeHalves),
            other => Err(format!(
                "unknown potential scheme `{other}` (expected sqrt2, parity or three-halves)"
            )),
        }
    }
}

pub fn clause_potential(clause: &Clause, scheme: PotentialScheme) -> Quad {
    scheme.weight(clause.width())
}

pub fn cnf_potential(cnf: &Cnf, scheme: PotentialScheme) -> Quad {
    cnf.iter().map(|c| clause_potential(c, scheme)).sum()
}

/// Potential of the clauses containing `lit` itself (not its negation).
pub fn literal_potential(cnf: &Cnf, lit: Literal, scheme: PotentialScheme) -> Quad {
    cnf.iter()
        .filter(|c| c.contains(lit))
        .map(|c| clause_potential(c, scheme))
        .sum()
}

/// Potentials of both literals of every variable below `universe_size`, in one
/// pass. Index `[var][0]` is the negative literal, `[var][1]` the positive one.
pub fn literal_potentials(cnf: &Cnf, universe_size: u32, scheme: PotentialScheme) -> Vec<[Quad; 2]> {
    let mut out = vec![[Quad::zero(), Quad::zero()]; universe_size as usize];
    for clause in cnf {
        let w = clause_potential(clause, scheme);
        for lit in clause.literals() {
            if let Some(slot) = out.get_mut(lit.var() as usize) {
                slot[usize::from(lit.is_positive())] += &w;
            }
        }
    }
    out
}

/// The eight-way split of a CNF's potential by how each clause relates to the
/// literal pair `(li, lj)`.
///
/// |                 | `lj` | `!lj` | neither |
/// |-----------------|------|-------|---------|
/// | `li`            | a    | b     | c       |
/// | `!li`           | d    | e     | f       |
/// | neither         | g    | h     |         |
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct OctSplit {
    pub a: Quad,
    pub b: Quad,
    pub c: Quad,
    pub d: Quad,
    pub e: Quad,
    pub f: Quad,
    pub g: Quad,
    pub h: Quad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("literals {0} and {1} share a variable")]
pub struct SameVariable(pub Literal, pub Literal);

pub fn oct_split(cnf: &Cnf, li: Literal, lj: Literal, scheme: PotentialScheme) -> Result<OctSplit, SameVariable> {
    if li.var() == lj.var() {
        return Err(SameVariable(li, lj));
    }
    let mut split = OctSplit::default();
    for clause in cnf {
        let on_i = clause.literal_on(li.var()).map(|l| l == li);
        let on_j = clause.literal_on(lj.var()).map(|l| l == lj);
        let slot = match (on_i, on_j) {
            (Some(true), Some(true)) => &mut split.a,
            (Some(true), Some(false)) => &mut split.b,
            (Some(true), None) => &mut split.c,
            (Some(false), Some(true)) => &mut split.d,
            (Some(false), Some(false)) => &mut split.e,
            (Some(false), None) => &mut split.f,
            (None, Some(true)) => &mut split.g,
            (None, Some(false)) => &mut split.h,
            (None, None) => continue,
        };
        *slot += clause_potential(clause, scheme);
    }
    Ok(split)
}

impl OctSplit {
    /// `a + b + c`, the potential of `li`.
    pub fn li(&self) -> Quad {
        &(&self.a + &self.b) + &self.c
    }

    /// `d + e + f`, the potential of `!li`.
    pub fn not_li(&self) -> Quad {
        &(&self.d + &self.e) + &self.f
    }

    /// `a + d + g`, the potential of `lj`.
    pub fn lj(&self) -> Quad {
        &(&self.a + &self.d) + &self.g
    }

    /// `b + e + h`, the potential of `!lj`.
    pub fn not_lj(&self) -> Quad {
        &(&self.b + &self.e) + &self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::rational;

    fn cnf(clauses: &[&[i64]]) -> Cnf {
        Cnf::from_dimacs(clauses).unwrap()
    }

    fn width(w: usize) -> Clause {
        Clause::new((0..w as u32).map(Literal::pos).collect()).unwrap()
    }

    #[test]
    fn clause_weights() {
        assert_eq!(clause_potential(&width(0), PotentialScheme::Sqrt2), Quad::one());
        assert_eq!(clause_potential(&width(3), PotentialScheme::Parity), Quad::from_ratio(1, 3));
        assert_eq!(clause_potential(&width(2), PotentialScheme::ThreeHalves), Quad::from_ratio(4, 9));
        assert_eq!(
            clause_potential(&width(1), PotentialScheme::Sqrt2),
            Quad::new(rational(0, 1), rational(1, 2))
        );
    }

    #[test]
    fn weights_match_closed_forms() {
        let inv_sqrt2 = Quad::sqrt2().recip().unwrap();
        let two_thirds = Quad::from_ratio(2, 3);
        for w in 0..=12u32 {
            let w_us = w as usize;
            assert_eq!(PotentialScheme::Sqrt2.weight(w_us), inv_sqrt2.pow(w));
            assert_eq!(PotentialScheme::ThreeHalves.weight(w_us), two_thirds.pow(w));
            let parity = if w % 2 == 0 {
                inv_sqrt2.pow(w)
            } else {
                &two_thirds * &inv_sqrt2.pow(w - 1)
            };
            assert_eq!(PotentialScheme::Parity.weight(w_us), parity);
        }
        assert_eq!(PotentialScheme::Sqrt2.weight(70), inv_sqrt2.pow(70));
    }

    #[test]
    fn shrinking_ratios() {
        let sqrt2 = Quad::sqrt2();
        for w in 1..=10usize {
            let ratio = |s: PotentialScheme| &s.weight(w - 1) * &s.weight(w).recip().unwrap();
            assert_eq!(ratio(PotentialScheme::Sqrt2), sqrt2);
            assert_eq!(ratio(PotentialScheme::ThreeHalves), Quad::from_ratio(3, 2));
            let expected = if w % 2 == 0 {
                Quad::from_ratio(4, 3)
            } else {
                Quad::from_ratio(3, 2)
            };
            assert_eq!(ratio(PotentialScheme::Parity), expected);
        }
    }

    #[test]
    fn cnf_and_literal_potentials() {
        let pairs = cnf(&[&[1, 2], &[-1, -2]]);
        assert_eq!(cnf_potential(&pairs, PotentialScheme::Sqrt2), Quad::one());
        assert_eq!(cnf_potential(&Cnf::default(), PotentialScheme::Sqrt2), Quad::zero());
        let contradiction = cnf(&[&[1], &[-1]]);
        assert_eq!(
            cnf_potential(&contradiction, PotentialScheme::ThreeHalves),
            Quad::from_ratio(4, 3)
        );
        // (x1 | x2) & (!x1 | !x2)
        let phi = cnf(&[&[2, 3], &[-2, -3]]);
        assert_eq!(
            literal_potential(&phi, Literal::pos(1), PotentialScheme::Sqrt2),
            Quad::from_ratio(1, 2)
        );
        assert_eq!(literal_potential(&phi, Literal::pos(3), PotentialScheme::Sqrt2), Quad::zero());
    }

    #[test]
    fn duplicates_are_counted() {
        let phi = cnf(&[&[1, 2], &[1, 2]]);
        assert_eq!(cnf_potential(&phi, PotentialScheme::Sqrt2), Quad::one());
    }

    #[test]
    fn oct_split_of_xor_pair() {
        let phi = cnf(&[&[2, 3], &[-2, -3]]);
        let s = oct_split(&phi, Literal::pos(1), Literal::pos(2), PotentialScheme::Sqrt2).unwrap();
        let half = Quad::from_ratio(1, 2);
        assert_eq!(s.a, half);
        assert_eq!(s.e, half);
        for z in [&s.b, &s.c, &s.d, &s.f, &s.g, &s.h] {
            assert!(z.is_zero());
        }
    }

    #[test]
    fn oct_split_absent_variables_is_zero() {
        let phi = cnf(&[&[1, 2], &[-1, 3]]);
        let s = oct_split(&phi, Literal::pos(7), Literal::neg(8), PotentialScheme::Parity).unwrap();
        assert_eq!(s, OctSplit::default());
    }

    #[test]
    fn oct_split_rejects_same_variable() {
        let phi = cnf(&[&[1, 2]]);
        assert!(oct_split(&phi, Literal::pos(0), Literal::neg(0), PotentialScheme::Sqrt2).is_err());
    }

    #[test]
    fn literal_potentials_agree_with_single_scan() {
        let phi = cnf(&[&[1, -2, 3], &[-1, 4], &[2], &[1, -2, 3]]);
        for scheme in PotentialScheme::ALL {
            let all = literal_potentials(&phi, 5, scheme);
            for v in 0..5 {
                for positive in [false, true] {
                    let l = Literal::new(v, positive);
                    assert_eq!(all[v as usize][usize::from(positive)], literal_potential(&phi, l, scheme));
                }
            }
        }
    }

    #[test]
    fn scheme_names_roundtrip() {
        for s in PotentialScheme::ALL {
            assert_eq!(s.name().parse::<PotentialScheme>().unwrap(), s);
        }
    }
}
