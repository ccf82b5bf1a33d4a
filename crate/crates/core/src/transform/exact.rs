use alloc::vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{factorial_rational, to_f64, Poly, Rational, Series};
use crate::{Error, Result};

/// `H(λ) = λ^lead · T(1/λ)` near `λ = ∞`, with `T` a truncated series in
/// `u = 1/λ` whose constant term is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatioExpansion {
    pub lead: i64,
    pub tail: Series,
}

impl RatioExpansion {
    pub fn new(lead: i64, tail: Series) -> Result<Self> {
        if tail.coeff(0).is_zero() {
            return Err(Error::InconsistentRatio(
                "ratio expansion tail must have a nonzero constant term".into(),
            ));
        }
        Ok(RatioExpansion { lead, tail })
    }

    /// Truncation order of the tail.
    pub fn order(&self) -> usize {
        self.tail.order()
    }
}

fn check_exponents(n: u32, m: u32) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidExponents { n, m });
    }
    Ok(())
}

/// Laplace transform of a polynomial as a series in `u = 1/λ`:
/// `L{x^i} = i! u^(i+1)`.
pub fn laplace_poly(p: &Poly, order: usize) -> Series {
    let mut coeffs = vec![Rational::zero(); order + 1];
    for (i, c) in p.coeffs().iter().enumerate().take(order) {
        coeffs[i + 1] = c * factorial_rational(i);
    }
    Series::new(coeffs, order)
}

/// Coefficients `(k·power + j)! · [x^(k·power + j)] f^power` for
/// `j = 0..=order`: the transform of `f^power` with its leading power of `u`
/// factored out.
fn normalised_transform(f: &Poly, power: u32, k: usize, order: usize) -> Series {
    let fp = f.pow(power);
    let base = k * power as usize;
    let coeffs = (0..=order)
        .map(|j| fp.coeff(base + j) * factorial_rational(base + j))
        .collect();
    Series::new(coeffs, order)
}

/// Exact expansion of `H_{n,m}(f, λ)` at `λ = ∞`, with the tail truncated
/// at `order`. The leading exponent is `k(m - n)` where `k` is the order of
/// vanishing of `f` at the origin.
pub fn ratio_expansion(f: &Poly, n: u32, m: u32, order: usize) -> Result<RatioExpansion> {
    check_exponents(n, m)?;
    let k = f.lowest_order().ok_or(Error::ZeroFunction)?;
    let numer = normalised_transform(f, n, k, order);
    let denom = normalised_transform(f, m, k, order);
    let tail = numer.div(&denom)?;
    let lead = k as i64 * (i64::from(m) - i64::from(n));
    RatioExpansion::new(lead, tail)
}

/// `numer(λ) / denom(λ)` in lowest terms: the polynomials are coprime,
/// have integer coefficients with no common content, and the denominator's
/// leading coefficient is positive. Equal functions therefore compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunctionLambda {
    numer: Poly,
    denom: Poly,
}

impl RationalFunctionLambda {
    pub fn new(numer: Poly, denom: Poly) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::Domain("rational function with zero denominator".into()));
        }
        if numer.is_zero() {
            return Ok(RationalFunctionLambda {
                numer,
                denom: Poly::one(),
            });
        }
        let g = numer.gcd(&denom);
        let (numer, _) = numer.div_rem(&g);
        let (denom, _) = denom.div_rem(&g);

        let lcm = numer
            .coeffs()
            .iter()
            .chain(denom.coeffs())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let content = numer
            .coeffs()
            .iter()
            .chain(denom.coeffs())
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .fold(BigInt::zero(), |acc, c| acc.gcd(&c));
        let mut factor = Rational::new(lcm, content);
        if denom.leading_coeff().is_some_and(Signed::is_negative) {
            factor = -factor;
        }
        Ok(RationalFunctionLambda {
            numer: numer.scale(&factor),
            denom: denom.scale(&factor),
        })
    }

    pub fn numer(&self) -> &Poly {
        &self.numer
    }

    pub fn denom(&self) -> &Poly {
        &self.denom
    }

    pub fn eval_f64(&self, lambda: f64) -> f64 {
        self.numer.eval_f64(lambda) / self.denom.eval_f64(lambda)
    }

    /// Expansion at `λ = ∞`. Writing `P(λ) = λ^p · P̃(1/λ)` with `P̃` the
    /// reversed coefficient list, `P/Q = λ^(p-q) · P̃(u)/Q̃(u)`.
    pub fn expand(&self, order: usize) -> Result<RatioExpansion> {
        let (p, q) = match (self.numer.degree(), self.denom.degree()) {
            (Some(p), Some(q)) => (p, q),
            _ => return Err(Error::ZeroFunction),
        };
        let reversed = |poly: &Poly| {
            let mut c = poly.coeffs().to_vec();
            c.reverse();
            Series::new(c, order)
        };
        let tail = reversed(&self.numer).div(&reversed(&self.denom))?;
        RatioExpansion::new(p as i64 - q as i64, tail)
    }
}

/// `H_{n,m}(f, ·)` in closed form. For a polynomial `f^j` of degree `D`,
/// `L{f^j}(λ) = λ^-(D+1) Σ_i i! c_i λ^(D-i)`.
pub fn ratio_rational(f: &Poly, n: u32, m: u32) -> Result<RationalFunctionLambda> {
    check_exponents(n, m)?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let scaled = |power: u32| -> (Poly, usize) {
        let fp = f.pow(power);
        let d = fp.degree().expect("power of a nonzero polynomial");
        let mut coeffs = vec![Rational::zero(); d + 1];
        for (i, c) in fp.coeffs().iter().enumerate() {
            coeffs[d - i] = c * factorial_rational(i);
        }
        (Poly::new(coeffs), d)
    };
    let (pn, dn) = scaled(n);
    let (pm, dm) = scaled(m);
    let numer = &pn * &Poly::monomial(Rational::one(), dm + 1);
    let denom = &pm * &Poly::monomial(Rational::one(), dn + 1);
    RationalFunctionLambda::new(numer, denom)
}

/// Maclaurin polynomial of `sin` through degree `degree`.
pub fn maclaurin_sin(degree: usize) -> Poly {
    let mut coeffs = vec![Rational::zero(); degree + 1];
    for (i, c) in coeffs.iter_mut().enumerate().skip(1).step_by(2) {
        let sign = if (i / 2) % 2 == 0 { 1 } else { -1 };
        *c = Rational::from_integer(sign.into()) / factorial_rational(i);
    }
    Poly::new(coeffs)
}

/// The closed form `2(λ² + 1) / (λ(λ² + 4))` of `H_{2,1}(sin, ·)`.
pub fn sin_ratio_closed_form() -> RationalFunctionLambda {
    RationalFunctionLambda::new(Poly::from_ints(&[2, 0, 2]), Poly::from_ints(&[0, 4, 0, 1]))
        .expect("nonzero denominator")
}

/// Whether the expansion of `H_{n,m}(f, ·)` agrees exactly with that of
/// `target` through tail order `through` (leading exponents included).
pub fn ratio_matches(
    f: &Poly,
    n: u32,
    m: u32,
    target: &RationalFunctionLambda,
    through: usize,
) -> Result<bool> {
    let ours = ratio_expansion(f, n, m, through)?;
    let theirs = target.expand(through)?;
    Ok(ours == theirs)
}

/// Expands the degree-`order` Maclaurin polynomial of `sin` through
/// `H_{2,1}` and compares it with `2(λ²+1)/(λ(λ²+4))` at every tail order
/// the truncation leaves intact (`order - 1`, since `sin` vanishes to first
/// order).
pub fn sin_ratio_check(order: usize) -> bool {
    sin_ratio_check_for(&maclaurin_sin(order), order)
}

/// [`sin_ratio_check`] on a caller-supplied degree-`order` polynomial.
pub fn sin_ratio_check_for(f: &Poly, order: usize) -> bool {
    let Some(k) = f.lowest_order() else {
        return false;
    };
    let Some(through) = order.checked_sub(k) else {
        return false;
    };
    ratio_matches(f, 2, 1, &sin_ratio_closed_form(), through).unwrap_or(false)
}

impl core::fmt::Display for RatioExpansion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "λ^{} · (", self.lead)?;
        for (i, c) in self.tail.coeffs().iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}·u^{i}")?;
        }
        write!(f, " + O(u^{}))", self.order() + 1)
    }
}

/// Numeric value of a truncated expansion at `λ`, summing the tail terms.
pub fn eval_expansion(expansion: &RatioExpansion, lambda: f64) -> f64 {
    let u = 1.0 / lambda;
    let tail: f64 = expansion
        .tail
        .coeffs()
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * u + to_f64(c));
    libm::pow(lambda, expansion.lead as f64) * tail
}
