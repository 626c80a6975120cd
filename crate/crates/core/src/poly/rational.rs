//! Helpers around [`BigRational`], the exact scalar used throughout the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// The exact dyadic value of a finite float.
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Exact square root when both numerator and denominator are perfect squares.
pub fn sqrt_exact(value: &Rational) -> Option<Rational> {
    if value.is_negative() {
        return None;
    }
    let n = value.numer().sqrt();
    let d = value.denom().sqrt();
    if &(&n * &n) == value.numer() && &(&d * &d) == value.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// The rational with the smallest denominator in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    if !lo.is_positive() {
        return Rational::zero();
    }
    let floor = lo.floor();
    if &floor == lo {
        return floor;
    }
    let ceil = lo.ceil();
    if &ceil <= hi {
        return ceil;
    }
    // lo and hi share the integer part; recurse on the reciprocals of the fractional parts
    let inner = simplest_between(&(hi - &floor).recip(), &(lo - &floor).recip());
    floor + inner.recip()
}

/// Simplest rational within `tol` of `value`.
pub fn approximate(value: f64, tol: f64) -> Option<Rational> {
    let centre = from_f64(value)?;
    let tol = from_f64(tol.abs())?;
    Some(simplest_between(&(&centre - &tol), &(&centre + &tol)))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
