//! Exact rational helpers over arbitrary-precision integers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn big(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

/// Parses `a/b` or a plain integer.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::OutOfRange(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn ceil(q: &Rational) -> BigInt {
    q.numer().div_ceil(q.denom())
}

pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

/// `ceil(q)` as a non-negative integer; negative inputs clamp to zero.
pub fn ceil_u(q: &Rational) -> BigUint {
    ceil(q).to_biguint().unwrap_or_default()
}

pub fn pow(q: &Rational, e: u32) -> Rational {
    num_traits::pow(q.clone(), e as usize)
}

pub fn max(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge numerators/denominators before dividing
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Renders as `a/b`, or `a` for integers.
pub fn show(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6").unwrap(), frac(1, 2));
        assert_eq!(parse(" -7 ").unwrap(), int(-7));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn ceil_and_floor() {
        assert_eq!(ceil(&frac(7, 2)), BigInt::from(4));
        assert_eq!(floor(&frac(-7, 2)), BigInt::from(-4));
        assert_eq!(ceil(&int(5)), BigInt::from(5));
    }

    #[test]
    fn f64_of_huge_values() {
        let q = Rational::new(BigInt::from(10).pow(400), BigInt::from(10).pow(399));
        assert!((to_f64(&q) - 10.0).abs() < 1e-9);
    }
}
