use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Poly, Rational};

/// `value + slope·ε` with `ε² = 0`: a number carrying one unknown linearly.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Jet {
    pub value: Rational,
    pub slope: Rational,
}

impl Jet {
    pub fn new(value: Rational, slope: Rational) -> Self {
        Jet { value, slope }
    }

    pub fn constant(value: Rational) -> Self {
        Jet::new(value, Rational::zero())
    }

    /// The unknown itself, `0 + 1·ε`.
    pub fn unknown() -> Self {
        Jet::new(Rational::zero(), Rational::one())
    }

    pub fn zero() -> Self {
        Jet::constant(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero() && self.slope.is_zero()
    }

    pub fn scale(&self, factor: &Rational) -> Jet {
        Jet::new(&self.value * factor, &self.slope * factor)
    }
}

impl Add for &Jet {
    type Output = Jet;

    fn add(self, rhs: &Jet) -> Jet {
        Jet::new(&self.value + &rhs.value, &self.slope + &rhs.slope)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.value += &rhs.value;
        self.slope += &rhs.slope;
    }
}

impl Sub for &Jet {
    type Output = Jet;

    fn sub(self, rhs: &Jet) -> Jet {
        Jet::new(&self.value - &rhs.value, &self.slope - &rhs.slope)
    }
}

impl Neg for &Jet {
    type Output = Jet;

    fn neg(self) -> Jet {
        Jet::new(-&self.value, -&self.slope)
    }
}

impl Mul for &Jet {
    type Output = Jet;

    fn mul(self, rhs: &Jet) -> Jet {
        Jet::new(
            &self.value * &rhs.value,
            &self.value * &rhs.slope + &rhs.value * &self.slope,
        )
    }
}

/// Product of two jet polynomials, keeping only the first `len` coefficients.
fn mul_truncated(a: &[Jet], b: &[Jet], len: usize) -> Vec<Jet> {
    let len = len.min((a.len() + b.len()).saturating_sub(1));
    let mut out = vec![Jet::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += &(x * y);
        }
    }
    out
}

/// `base^n` for a jet polynomial, truncated to its first `len` coefficients.
pub fn jet_pow_truncated(base: &[Jet], n: u32, len: usize) -> Vec<Jet> {
    let mut result = vec![Jet::constant(Rational::one())];
    let mut square = base.to_vec();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_truncated(&result, &square, len);
        }
        e >>= 1;
        if e > 0 {
            square = mul_truncated(&square, &square, len);
        }
    }
    result.truncate(len);
    result
}

/// Coefficients of `(p_< + a·x^unknown_degree)^n`, where `p_<` keeps the
/// coefficients of `p` below `unknown_degree` and `a` is carried to first
/// order (as the jet slope).
pub fn jet_poly_pow(p: &Poly, unknown_degree: usize, n: u32) -> Vec<Jet> {
    let mut base: Vec<Jet> = (0..unknown_degree)
        .map(|i| Jet::constant(p.coeff(i)))
        .collect();
    base.push(Jet::unknown());
    let full_len = (unknown_degree * n as usize) + 1;
    jet_pow_truncated(&base, n, full_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rational;

    fn q(text: &str) -> Rational {
        parse_rational(text).unwrap()
    }

    #[test]
    fn ring_law_for_products() {
        let a = Jet::new(q("2"), q("3"));
        let b = Jet::new(q("5"), q("-1/2"));
        assert_eq!(&a * &b, Jet::new(q("10"), q("14")));
    }

    #[test]
    fn zero_slope_matches_rationals() {
        let (x, y) = (q("7/3"), q("-2/5"));
        let (jx, jy) = (Jet::constant(x.clone()), Jet::constant(y.clone()));
        assert_eq!(&jx * &jy, Jet::constant(&x * &y));
        assert_eq!(&jx + &jy, Jet::constant(&x + &y));
        assert_eq!(&jx - &jy, Jet::constant(&x - &y));
    }

    #[test]
    fn square_of_x_plus_unknown_x_squared() {
        let coeffs = jet_poly_pow(&Poly::from_ints(&[0, 1]), 2, 2);
        assert_eq!(coeffs[2], Jet::constant(q("1")));
        assert_eq!(coeffs[3], Jet::new(q("0"), q("2")));
        // a² x⁴ is second order in the unknown and disappears.
        assert!(coeffs[4].is_zero());
    }

    #[test]
    fn first_power_is_linear() {
        let coeffs = jet_poly_pow(&Poly::from_ints(&[3, -1, 4]), 3, 1);
        for (i, c) in coeffs.iter().enumerate() {
            let slope = if i == 3 { q("1") } else { q("0") };
            assert_eq!(c.slope, slope, "degree {i}");
        }
    }

    #[test]
    fn binomial_cube() {
        let coeffs = jet_poly_pow(&Poly::one(), 1, 3);
        assert_eq!(coeffs[0], Jet::constant(q("1")));
        assert_eq!(coeffs[1], Jet::new(q("0"), q("3")));
    }

    #[test]
    fn coefficients_above_the_unknown_are_ignored() {
        let with_tail = jet_poly_pow(&Poly::from_ints(&[1, 2, 9, 9]), 2, 3);
        let without = jet_poly_pow(&Poly::from_ints(&[1, 2]), 2, 3);
        assert_eq!(with_tail, without);
    }
}
