//! Scalar abstraction shared by the exact and floating-point code paths.

use std::fmt::Debug;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Arbitrary-precision rational number (reduced, positive denominator).
pub type Rational = BigRational;

/// Field of scalars the algebraic layer is generic over.
///
/// Implemented for `f32`, `f64` and [`Rational`]. Exact code paths (basis
/// changes, structure constants, scaling exponents) are run with `Rational`,
/// flows and sums with `f64`.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// The value `num / den`.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Largest integer not exceeding `self`.
    fn floor(&self) -> Self;

    /// Nearest `f64` (lossy for rationals).
    fn to_f64(&self) -> f64;

    /// Conversion from `f64`; exact for `Rational` since every finite double is dyadic.
    fn from_f64(x: f64) -> Self;

    /// Conversion of a (possibly large) integer.
    fn from_bigint(n: &BigInt) -> Self;

    /// True when the scalar is represented exactly (no rounding).
    fn is_exact() -> bool {
        false
    }

    /// The exact rational value of the representation, if finite.
    fn to_rational(&self) -> Option<Rational> {
        BigRational::from_float(self.to_f64())
    }

    /// Relative representation error of a real input (zero when exact).
    fn unit_roundoff() -> f64 {
        f64::EPSILON / 2.0
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn floor(&self) -> Self {
        f32::floor(*self)
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }
    fn unit_roundoff() -> f64 {
        f32::EPSILON as f64 / 2.0
    }
}

impl Scalar for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn floor(&self) -> Self {
        BigRational::floor(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite double")
    }
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn is_exact() -> bool {
        true
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn unit_roundoff() -> f64 {
        0.0
    }
}

/// Generalized binomial coefficient `t(t-1)...(t-j+1)/j!` for a scalar `t`.
pub fn binomial<T: Scalar>(t: &T, j: usize) -> T {
    let mut acc = T::one();
    for i in 0..j {
        let num = t.clone() - T::from_usize(i).unwrap();
        acc = acc * num / T::from_usize(i + 1).unwrap();
    }
    acc
}

/// All generalized binomials `binom(t, 0..=jmax)`.
pub fn binomials<T: Scalar>(t: &T, jmax: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(jmax + 1);
    let mut acc = T::one();
    out.push(acc.clone());
    for i in 0..jmax {
        let num = t.clone() - T::from_usize(i).unwrap();
        acc = acc * num / T::from_usize(i + 1).unwrap();
        out.push(acc.clone());
    }
    out
}

/// Exact rational from a pair of integers, as a convenience for tests and configs.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::traits::{One, Zero};

    #[test]
    fn binomial_matches_pascal_on_integers() {
        for n in 0..12i64 {
            let row = binomials(&q(n, 1), 12);
            for j in 1..12 {
                let prev = binomials(&q(n - 1, 1), 12);
                assert_eq!(row[j], prev[j].clone() + prev[j - 1].clone());
            }
        }
    }

    #[test]
    fn binomial_of_negative_one_alternates() {
        let b = binomials(&q(-1, 1), 6);
        for (j, v) in b.iter().enumerate() {
            let expected = if j % 2 == 0 { Rational::one() } else { -Rational::one() };
            assert_eq!(*v, expected);
        }
    }

    #[test]
    fn rational_floor_and_conversion() {
        assert_eq!(Scalar::floor(&q(-1, 2)), q(-1, 1));
        assert_eq!(Scalar::floor(&q(7, 3)), q(2, 1));
        assert_eq!(<Rational as Scalar>::from_f64(0.375), q(3, 8));
        assert!(<Rational as Scalar>::from_f64(0.0).is_zero());
        assert_eq!(binomial(&0.5f64, 2), -0.125);
    }
}
