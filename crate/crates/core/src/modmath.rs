//! Accurate arithmetic modulo one.
//!
//! Orbit points and polynomial phases only matter modulo the integers, but the
//! integer multipliers that appear (binomial coefficients of the time) grow
//! polynomially. The helpers here multiply an exact integer by a double and
//! return the fractional part without ever forming the large product in
//! floating point.

use num::bigint::{BigInt, Sign};
use num::traits::{Signed, ToPrimitive, Zero};

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Signed distance to the nearest integer, in `[-1/2, 1/2]`.
#[inline]
pub fn centered(x: f64) -> f64 {
    x - x.round()
}

/// Distance to the nearest integer.
#[inline]
pub fn dist_z(x: f64) -> f64 {
    centered(x).abs()
}

/// Exact generalized binomial `binom(n, j)` for integer `n` (any sign), or
/// `None` on `i128` overflow.
pub fn binom_i128(n: i64, j: usize) -> Option<i128> {
    let mut acc: i128 = 1;
    for i in 0..j as i128 {
        acc = acc.checked_mul(n as i128 - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// Exact generalized binomial as a big integer.
pub fn binom_big(n: &BigInt, j: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..j {
        acc *= n - BigInt::from(i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

/// `frac(b * x)` computed exactly and rounded once.
pub fn mul_mod1(b: i128, x: f64) -> f64 {
    if b == 0 || x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    let (mant, exp, neg_x) = decode(x);
    if exp >= 0 {
        return 0.0;
    }
    let shift = (-exp) as u32;
    if shift >= 128 {
        return mul_mod1_big(&BigInt::from(b), x);
    }
    let neg = neg_x ^ (b < 0);
    let ub = b.unsigned_abs();
    let r = mulmod_pow2(ub, mant, shift);
    to_unit(r, shift, neg)
}

/// `frac(b * x)` for a big-integer multiplier.
pub fn mul_mod1_big(b: &BigInt, x: f64) -> f64 {
    if b.is_zero() || x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    let (mant, exp, neg_x) = decode(x);
    if exp >= 0 {
        return 0.0;
    }
    let shift = (-exp) as usize;
    let modulus = BigInt::from(1) << shift;
    let prod = (b.abs() * BigInt::from(mant)) % &modulus;
    let neg = neg_x ^ (b.sign() == Sign::Minus);
    if prod.is_zero() {
        return 0.0;
    }
    // Keep the top 64 significant bits of the residue.
    let bits = prod.bits() as usize;
    let (top, scale) = if bits > 64 {
        ((&prod >> (bits - 64)).to_u64().unwrap(), shift - (bits - 64))
    } else {
        (prod.to_u64().unwrap(), shift)
    };
    let v = top as f64 * 2f64.powi(-(scale as i32));
    let v = if neg { 1.0 - v } else { v };
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

/// Mantissa, binary exponent and sign with `|x| = mant * 2^exp`, mantissa odd or zero.
fn decode(x: f64) -> (u64, i32, bool) {
    let bits = x.to_bits();
    let neg = bits >> 63 == 1;
    let e = ((bits >> 52) & 0x7ff) as i32;
    let f = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp) = if e == 0 { (f, -1074) } else { (f | (1u64 << 52), e - 1075) };
    if mant != 0 {
        let tz = mant.trailing_zeros();
        mant >>= tz;
        exp += tz as i32;
    }
    (mant, exp, neg)
}

/// `(a * m) mod 2^shift` for `shift < 128`.
fn mulmod_pow2(a: u128, m: u64, shift: u32) -> u128 {
    let mask = if shift == 128 { u128::MAX } else { (1u128 << shift) - 1 };
    let a = a & mask;
    let lo = (a as u64) as u128 * m as u128;
    let hi = (a >> 64) * m as u128;
    let hi_shifted = if shift > 64 { hi.wrapping_shl(64) } else { 0 };
    lo.wrapping_add(hi_shifted) & mask
}

fn to_unit(r: u128, shift: u32, neg: bool) -> f64 {
    if r == 0 {
        return 0.0;
    }
    let v = r as f64 * 2f64.powi(-(shift as i32));
    let v = if neg { 1.0 - v } else { v };
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

/// Fixed-point representation of a residue modulo one as a fraction of `2^128`.
pub type Fixed = u128;

/// `x mod 1` as a [`Fixed`], truncating bits below `2^-128`.
pub fn fixed_from_f64(x: f64) -> Fixed {
    if x == 0.0 || !x.is_finite() {
        return 0;
    }
    let (mant, exp, neg) = decode(x);
    let r = if exp >= 0 {
        0
    } else {
        let shift = -exp;
        if shift > 128 {
            let down = (shift - 128) as u32;
            if down >= 64 {
                0
            } else {
                (mant >> down) as u128
            }
        } else {
            let up = 128 - shift as u32;
            if up >= 128 {
                0
            } else {
                (mant as u128).wrapping_shl(up)
            }
        }
    };
    if neg {
        r.wrapping_neg()
    } else {
        r
    }
}

/// Exact residue of a rational modulo one, truncated to `2^-128`.
pub fn fixed_from_rational(x: &num::rational::BigRational) -> Fixed {
    let num = x.numer();
    let den = x.denom();
    let modulus: BigInt = BigInt::from(1) << 128;
    let scaled: BigInt = num::Integer::div_floor(&(num * &modulus), den);
    let r: BigInt = ((scaled % &modulus) + &modulus) % &modulus;
    r.to_u128().unwrap()
}

/// Big integer reduced modulo `2^128`.
pub fn bigint_mod_2_128(n: &BigInt) -> u128 {
    let modulus: BigInt = BigInt::from(1) << 128;
    let r: BigInt = ((n % &modulus) + &modulus) % &modulus;
    r.to_u128().unwrap()
}

/// Top 53 bits of a fixed-point residue as a double in `[0, 1)`.
#[inline]
pub fn fixed_to_f64(x: Fixed) -> f64 {
    (x >> 75) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_mod1_matches_big_integer_reference() {
        let xs = [0.618_033_988_749_894_9, -0.3, 1e-9, 0.5, 0.123_456_789, 3.75];
        let bs: [i128; 6] = [1, -7, 1_000_003, 123_456_789_012_345, -98_765_432_109_876_543, 1 << 100];
        for &x in &xs {
            for &b in &bs {
                let fast = mul_mod1(b, x);
                let slow = mul_mod1_big(&BigInt::from(b), x);
                assert!((fast - slow).abs() < 1e-15, "b={b} x={x} {fast} {slow}");
                assert!((0.0..1.0).contains(&fast));
            }
        }
    }

    #[test]
    fn mul_mod1_small_products_agree_with_direct() {
        for b in -50i128..50 {
            let x = 0.137_5;
            assert!((mul_mod1(b, x) - frac(b as f64 * x)).abs() < 1e-15);
        }
    }

    #[test]
    fn binomials_of_negative_integers() {
        assert_eq!(binom_i128(-1, 3), Some(-1));
        assert_eq!(binom_i128(-2, 2), Some(3));
        assert_eq!(binom_i128(10, 3), Some(120));
        assert_eq!(binom_i128(3, 5), Some(0));
        assert_eq!(binom_big(&BigInt::from(-3), 2), BigInt::from(6));
    }

    #[test]
    fn fixed_point_round_trip() {
        for &x in &[0.0, 0.25, 0.75, 0.1, -0.1, 5.5] {
            let r = fixed_to_f64(fixed_from_f64(x));
            assert!((r - frac(x)).abs() < 1e-15, "{x}");
        }
        let third = num::rational::BigRational::new(1.into(), 3.into());
        assert!((fixed_to_f64(fixed_from_rational(&third)) - 1.0 / 3.0).abs() < 1e-15);
    }
}
