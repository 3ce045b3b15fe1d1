//! Exact numbers of the form `r + s·√2` with arbitrary-precision rational `r`, `s`.
//!
//! Every potential in the crate lives here. Comparison is exact: the sign of
//! `r + s√2` is read off the signs of `r` and `s`, and when they disagree, from
//! `r²` versus `2s²`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Rational scalar used by [`Quad`].
pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Quad {
    r: Rational,
    s: Rational,
}

impl Quad {
    pub fn new(r: Rational, s: Rational) -> Self {
        Quad { r, s }
    }

    pub fn from_rational(r: Rational) -> Self {
        Quad { r, s: Rational::zero() }
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Quad::from_rational(rational(numer, denom))
    }

    pub fn zero() -> Self {
        Quad::default()
    }

    pub fn one() -> Self {
        Quad::from_rational(Rational::one())
    }

    pub fn sqrt2() -> Self {
        Quad::new(Rational::zero(), Rational::one())
    }

    /// Rational part.
    pub fn rational_part(&self) -> &Rational {
        &self.r
    }

    /// Coefficient of √2.
    pub fn sqrt2_part(&self) -> &Rational {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_zero()
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sr = sign_of(&self.r);
        let ss = sign_of(&self.s);
        if sr >= 0 && ss >= 0 {
            return i32::from(sr > 0 || ss > 0);
        }
        if sr <= 0 && ss <= 0 {
            return -1;
        }
        // Opposite signs: the bigger of |r| and |s|·√2 wins, compared squared.
        let r2 = &self.r * &self.r;
        let s2 = &self.s * &self.s * BigInt::from(2);
        match r2.cmp(&s2) {
            Ordering::Greater => sr,
            Ordering::Less => ss,
            Ordering::Equal => 0, // unreachable for r, s != 0 since √2 is irrational
        }
    }

    pub fn scale(&self, k: &Rational) -> Quad {
        Quad::new(&self.r * k, &self.s * k)
    }

    pub fn pow(&self, exp: u32) -> Quad {
        let mut acc = Quad::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero. `1/(r + s√2) = (r - s√2)/(r² - 2s²)`.
    pub fn recip(&self) -> Option<Quad> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.r * &self.r - &self.s * &self.s * BigInt::from(2);
        Some(Quad::new(&self.r / &norm, -&self.s / &norm))
    }

    /// Floating approximation, for display only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.r.to_f64().unwrap_or(f64::NAN) + self.s.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

fn sign_of(q: &Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl Ord for Quad {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quad({self})")
    }
}

/// Renders `r + s√2` with both parts in lowest terms, omitting zero parts.
impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.r.is_zero(), self.s.is_zero()) {
            (_, true) => write!(f, "{}", self.r),
            (true, false) => write!(f, "{}√2", self.s),
            (false, false) => {
                if self.s.is_negative() {
                    write!(f, "{} - {}√2", self.r, -&self.s)
                } else {
                    write!(f, "{} + {}√2", self.r, self.s)
                }
            }
        }
    }
}

impl serde::Serialize for Quad {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'a> Add<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn add(self, rhs: &'a Quad) -> Quad {
        Quad::new(&self.r + &rhs.r, &self.s + &rhs.s)
    }
}

impl Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        Quad::new(self.r + rhs.r, self.s + rhs.s)
    }
}

impl<'a> AddAssign<&'a Quad> for Quad {
    fn add_assign(&mut self, rhs: &'a Quad) {
        self.r += &rhs.r;
        self.s += &rhs.s;
    }
}

impl AddAssign for Quad {
    fn add_assign(&mut self, rhs: Quad) {
        *self += &rhs;
    }
}

impl<'a> Sub<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn sub(self, rhs: &'a Quad) -> Quad {
        Quad::new(&self.r - &rhs.r, &self.s - &rhs.s)
    }
}

impl Sub for Quad {
    type Output = Quad;
    fn sub(self, rhs: Quad) -> Quad {
        Quad::new(self.r - rhs.r, self.s - rhs.s)
    }
}

impl<'a> SubAssign<&'a Quad> for Quad {
    fn sub_assign(&mut self, rhs: &'a Quad) {
        self.r -= &rhs.r;
        self.s -= &rhs.s;
    }
}

impl<'a> Mul<&'a Quad> for &'a Quad {
    type Output = Quad;
    fn mul(self, rhs: &'a Quad) -> Quad {
        let two = BigInt::from(2);
        Quad::new(
            &self.r * &rhs.r + &self.s * &rhs.s * two,
            &self.r * &rhs.s + &self.s * &rhs.r,
        )
    }
}

impl Mul for Quad {
    type Output = Quad;
    fn mul(self, rhs: Quad) -> Quad {
        &self * &rhs
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad::new(-self.r, -self.s)
    }
}

impl Neg for &Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad::new(-&self.r, -&self.s)
    }
}

impl Sum for Quad {
    fn sum<I: Iterator<Item = Quad>>(iter: I) -> Quad {
        iter.fold(Quad::zero(), |acc, q| acc + q)
    }
}

impl<'a> Sum<&'a Quad> for Quad {
    fn sum<I: Iterator<Item = &'a Quad>>(iter: I) -> Quad {
        iter.fold(Quad::zero(), |mut acc, q| {
            acc += q;
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(r: (i64, i64), s: (i64, i64)) -> Quad {
        Quad::new(rational(r.0, r.1), rational(s.0, s.1))
    }

    #[test]
    fn sqrt2_squares_to_two() {
        assert_eq!(Quad::sqrt2().pow(2), Quad::from_ratio(2, 1));
    }

    #[test]
    fn sign_near_cancellation() {
        // 99/70 is a convergent of √2 from above, 140/99 from below.
        assert_eq!(q((99, 70), (-1, 1)).signum(), 1);
        assert_eq!(q((140, 99), (-1, 1)).signum(), -1);
        assert_eq!(q((-99, 70), (1, 1)).signum(), -1);
        assert_eq!(Quad::zero().signum(), 0);
    }

    #[test]
    fn slack_between_half_and_sqrt2_minus_one() {
        // 1/2 >= √2 - 1
        let lhs = Quad::from_ratio(1, 2);
        let rhs = &Quad::sqrt2() - &Quad::one();
        assert!(lhs > rhs);
    }

    #[test]
    fn recip_roundtrip() {
        let x = q((3, 4), (-5, 7));
        assert_eq!(&x * &x.recip().unwrap(), Quad::one());
        assert!(Quad::zero().recip().is_none());
    }

    #[test]
    fn display_lowest_terms() {
        assert_eq!(q((2, 4), (0, 1)).to_string(), "1/2");
        assert_eq!(q((0, 1), (3, 6)).to_string(), "1/2√2");
        assert_eq!(q((1, 3), (-1, 2)).to_string(), "1/3 - 1/2√2");
        assert_eq!(q((1, 3), (1, 2)).to_string(), "1/3 + 1/2√2");
    }

    fn arb_quad() -> impl Strategy<Value = Quad> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| q((a, b), (c, d)))
    }

    proptest! {
        #[test]
        fn ring_axioms(x in arb_quad(), y in arb_quad(), z in arb_quad()) {
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x * &y, &y * &x);
        }

        #[test]
        fn order_is_consistent_with_subtraction(x in arb_quad(), y in arb_quad()) {
            prop_assert_eq!(x.cmp(&y), (&x - &y).signum().cmp(&0));
            prop_assert_eq!(x.cmp(&y).reverse(), y.cmp(&x));
        }

        #[test]
        fn sign_matches_float_when_not_close(x in arb_quad()) {
            let f = x.to_f64();
            prop_assume!(f.abs() > 1e-9);
            prop_assert_eq!(x.signum(), if f > 0.0 { 1 } else { -1 });
        }
    }
}
