use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{factorial_rational, to_f64, Rational};

/// Dense univariate polynomial over [`Rational`]; `coeffs[i]` multiplies
/// `x^i`. Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `c · x^degree`.
    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Index of the first nonzero coefficient, i.e. the order of vanishing
    /// at the origin.
    pub fn lowest_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, factor: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Keeps the coefficients of degree `< len`.
    pub fn truncate(&self, len: usize) -> Poly {
        Poly::new(self.coeffs.iter().take(len).cloned().collect())
    }

    /// Exact `n`-th power by repeated squaring; `p^0 = 1`.
    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Convolution on the half line, `(p * q)(t) = ∫_0^t p(t - s) q(s) ds`.
    ///
    /// Termwise, `x^a * x^b = a! b! / (a+b+1)! · t^(a+b+1)`.
    pub fn convolve(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let len = self.coeffs.len() + other.coeffs.len();
        let mut out = vec![Rational::zero(); len];
        // Scale to the "exponential" basis x^i / i! where convolution is a
        // plain Cauchy product with a shift by one.
        let lift = |p: &Poly| -> Vec<Rational> {
            p.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * factorial_rational(i))
                .collect()
        };
        let (a, b) = (lift(self), lift(other));
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                out[i + j + 1] += ai * bj;
            }
        }
        for (d, c) in out.iter_mut().enumerate() {
            if !c.is_zero() {
                *c /= factorial_rational(d);
            }
        }
        Poly::new(out)
    }

    /// `p(x + shift)`.
    pub fn taylor_shift(&self, shift: &Rational) -> Poly {
        // Horner in the shifted variable.
        let mut out = Poly::zero();
        let linear = Poly::new(vec![shift.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            out = &(&out * &linear) + &Poly::constant(c.clone());
        }
        out
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// Polynomial long division over the rationals: `self = q·divisor + r`
    /// with `deg r < deg divisor`.
    ///
    /// Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let d_deg = divisor.degree().expect("polynomial division by zero");
        let lead = divisor.coeffs[d_deg].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d_deg {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - d_deg];
        for shift in (0..quot.len()).rev() {
            let c = &rem[shift + d_deg] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &c * dc;
            }
            quot[shift] = c;
        }
        rem.truncate(d_deg);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Positive rational multiple with coprime integer coefficients and a
    /// positive leading coefficient.
    pub fn primitive_part(&self) -> Poly {
        let Some(lead) = self.leading_coeff() else {
            return Poly::zero();
        };
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let content = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .fold(BigInt::zero(), |acc, c| acc.gcd(&c));
        let mut factor = Rational::new(lcm, content);
        if lead.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let ints = |p: &Poly| -> Vec<BigInt> {
            p.primitive_part().coeffs.iter().map(|c| c.to_integer()).collect()
        };
        let (mut a, mut b) = (ints(self), ints(other));
        if a.len() < b.len() {
            core::mem::swap(&mut a, &mut b);
        }
        // Primitive remainder sequence: integer pseudo-division, then the
        // content is divided out so coefficients stay small.
        while !b.is_empty() {
            let r = primitive_ints(pseudo_remainder(a, &b));
            a = b;
            b = r;
        }
        let g = Poly::new(a.into_iter().map(Rational::from_integer).collect());
        match g.leading_coeff() {
            Some(lead) => {
                let inv = lead.recip();
                g.scale(&inv)
            }
            None => g,
        }
    }
}

/// `lc(b)^(deg a - deg b + 1) · a mod b` over the integers, trimmed.
fn pseudo_remainder(mut a: Vec<BigInt>, b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lead = &b[db];
    while a.len() > db {
        let top = a.len() - 1;
        let c = a[top].clone();
        for x in a.iter_mut() {
            *x *= lead;
        }
        for (k, bk) in b.iter().enumerate() {
            a[top - db + k] -= &c * bk;
        }
        a.pop();
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
    }
    a
}

fn primitive_ints(mut a: Vec<BigInt>) -> Vec<BigInt> {
    let content = a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !content.is_zero() && !content.is_one() {
        for x in a.iter_mut() {
            *x /= &content;
        }
    }
    a
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{mag}·x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{mag}·x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}
