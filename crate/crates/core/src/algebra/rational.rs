use alloc::string::ToString;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::{Error, Result};

/// Exact arbitrary-precision fraction, always in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Parses `"p"` or `"p/q"` (decimal integers, optional sign on `p` only).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(text.to_string());
    let is_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());

    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let unsigned = num.strip_prefix(['-', '+']).unwrap_or(num);
    if !is_digits(unsigned) {
        return Err(bad());
    }
    let numer = BigInt::from_str(num).map_err(|_| bad())?;
    let denom = match den {
        None => BigInt::one(),
        Some(d) if is_digits(d) => BigInt::from_str(d).map_err(|_| bad())?,
        Some(_) => return Err(bad()),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

pub fn rational_from_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn to_f64(value: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
}

#[cfg(feature = "std")]
mod cache {
    use std::sync::RwLock;

    use num_bigint::BigUint;

    static FACTORIALS: RwLock<Vec<BigUint>> = RwLock::new(Vec::new());

    pub(super) fn factorial(n: usize) -> BigUint {
        {
            let table = FACTORIALS.read().unwrap_or_else(|e| e.into_inner());
            if let Some(value) = table.get(n) {
                return value.clone();
            }
        }
        let mut table = FACTORIALS.write().unwrap_or_else(|e| e.into_inner());
        if table.is_empty() {
            table.push(BigUint::from(1u32));
        }
        while table.len() <= n {
            let i = table.len();
            let next = &table[i - 1] * BigUint::from(i);
            table.push(next);
        }
        table[n].clone()
    }
}

#[cfg(not(feature = "std"))]
mod cache {
    use num_bigint::BigUint;

    pub(super) fn factorial(n: usize) -> BigUint {
        (2..=n).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i))
    }
}

/// `n!`, cached process-wide up to the largest index requested.
pub fn factorial(n: usize) -> BigUint {
    cache::factorial(n)
}

pub fn factorial_rational(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(factorial(n)))
}

/// Beta function at positive integer arguments,
/// `B(α, β) = (α-1)! (β-1)! / (α+β-1)!`.
pub fn beta_rational(alpha: u64, beta: u64) -> Result<Rational> {
    if alpha < 1 || beta < 1 {
        return Err(Error::Domain(alloc::format!(
            "beta arguments must be positive integers (got {alpha}, {beta})"
        )));
    }
    let (a, b) = (alpha as usize, beta as usize);
    let numer = factorial(a - 1) * factorial(b - 1);
    let denom = factorial(a + b - 1);
    Ok(Rational::new(BigInt::from(numer), BigInt::from(denom)))
}

/// Signed integer power, `base^exp` for any `exp` (base must be nonzero when
/// `exp < 0`).
pub fn rational_powi(base: &Rational, exp: i64) -> Rational {
    let magnitude = base.clone().pow(BigUint::from(exp.unsigned_abs()));
    if exp < 0 {
        magnitude.recip()
    } else {
        magnitude
    }
}

/// The real `degree`-th root of `value` when it is rational.
///
/// For even `degree` this is the nonnegative root and `value` must be
/// nonnegative; for odd `degree` the root carries the sign of `value`.
pub fn rational_root(value: &Rational, degree: u32) -> Option<Rational> {
    if degree == 0 {
        return None;
    }
    if degree.is_multiple_of(2) && value.is_negative() {
        return None;
    }
    let int_root = |x: &BigInt| {
        let r = x.nth_root(degree);
        (Pow::pow(&r, degree) == *x).then_some(r)
    };
    let num = int_root(value.numer())?;
    let den = int_root(value.denom())?;
    Some(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> Rational {
        parse_rational(text).unwrap()
    }

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(q("3"), rational_from_int(3));
        assert_eq!(q("-6/4"), Rational::new((-3).into(), 2.into()));
        assert_eq!(q("+0/7"), Rational::zero());
        assert_eq!(*q("10/4").denom(), BigInt::from(2));
    }

    #[test]
    fn rejects_malformed_rationals() {
        for text in ["", "1/0", "1/-2", "1.5", "a/2", "1/", "/2", " 1", "--1", "1/2/3"] {
            assert!(parse_rational(text).is_err(), "{text:?} should be rejected");
        }
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(factorial(20), BigUint::from(2_432_902_008_176_640_000u64));
        // Asking for a smaller index after a larger one hits the filled table.
        assert_eq!(factorial(3), BigUint::from(6u32));
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta_rational(1, 1).unwrap(), q("1"));
        assert_eq!(beta_rational(2, 1).unwrap(), q("1/2"));
        assert_eq!(beta_rational(3, 4).unwrap(), q("1/60"));
        assert!(matches!(beta_rational(0, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn beta_matches_midpoint_quadrature() {
        // Independent route: integrate t^(a-1) (1-t)^(b-1) numerically.
        for (a, b) in [(3, 4), (2, 5), (6, 2), (1, 7)] {
            let steps = 200_000;
            let h = 1.0 / steps as f64;
            let integral: f64 = (0..steps)
                .map(|i| {
                    let t = (i as f64 + 0.5) * h;
                    t.powi(a - 1) * (1.0 - t).powi(b - 1) * h
                })
                .sum();
            let exact = to_f64(&beta_rational(a as u64, b as u64).unwrap());
            assert!((integral - exact).abs() < 1e-9 * exact, "B({a},{b})");
        }
    }

    #[test]
    fn beta_is_symmetric() {
        for a in 1..12 {
            for b in 1..12 {
                assert_eq!(beta_rational(a, b).unwrap(), beta_rational(b, a).unwrap());
            }
        }
    }

    #[test]
    fn rational_roots() {
        assert_eq!(rational_root(&q("4/9"), 2), Some(q("2/3")));
        assert_eq!(rational_root(&q("-8/27"), 3), Some(q("-2/3")));
        assert_eq!(rational_root(&q("-4"), 2), None);
        assert_eq!(rational_root(&q("2"), 2), None);
        assert_eq!(rational_root(&q("5"), 1), Some(q("5")));
    }

    #[test]
    fn signed_powers() {
        assert_eq!(rational_powi(&q("2/3"), 3), q("8/27"));
        assert_eq!(rational_powi(&q("2/3"), -2), q("9/4"));
        assert_eq!(rational_powi(&q("5"), 0), q("1"));
    }
}
