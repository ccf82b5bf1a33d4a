//! Recovery of the Taylor germ of `f` at the origin from the expansion of
//! `H_{n,m}(f, ·)` at infinity.
//!
//! Write `f(x) = x^k (c_k + c_{k+1} x + …)` with `c_k ≠ 0`. The transform of
//! `f^n` is `u^{kn+1} A(u)` with `A_j = (kn+j)! [x^j] (f/x^k)^n`, and likewise
//! `u^{km+1} B(u)` for `f^m`, so
//!
//! ```text
//! H = λ^{k(m-n)} · A(u)/B(u)
//! ```
//!
//! The leading exponent fixes `k`, the constant term fixes `c_k^{n-m}`, and
//! `c_ℓ` first enters `A` and `B` at index `ℓ - k`, linearly. Matching that
//! coefficient of `A - T·B` (with `T` the known tail) therefore determines
//! `c_ℓ` uniquely, because its multiplier is a nonzero multiple of
//! [`pivot_value`].

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::algebra::{
    beta_rational, factorial_rational, jet_pow_truncated, rational_powi, rational_root, to_f64,
    Jet, Poly, Rational,
};
use crate::transform::RatioExpansion;
use crate::{Error, Result};

/// The exponent pair `(n, m)` of `H_{n,m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RatioSpec {
    n: u32,
    m: u32,
}

impl RatioSpec {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n == 0 || m == 0 || n == m {
            return Err(Error::InvalidExponents { n, m });
        }
        Ok(RatioSpec { n, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `n - m`.
    pub fn gap(&self) -> i64 {
        i64::from(self.n) - i64::from(self.m)
    }

    /// `f` and `-f` share `H_{n,m}` exactly when `n - m` is even.
    pub fn sign_ambiguous(&self) -> bool {
        self.gap() % 2 == 0
    }

    /// Tail order that [`identify`] demands before recovering coefficients
    /// through `target_degree`: `k(n+m-1) + target_degree + 1`.
    pub fn required_order(&self, k: usize, target_degree: usize) -> usize {
        k * (self.n + self.m - 1) as usize + target_degree + 1
    }
}

/// Coefficients recovered so far: `coeffs[i]` is `c_{k+i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentifyState {
    pub k: usize,
    pub coeffs: Vec<Rational>,
    pub ambiguous_sign: bool,
    pub spec: RatioSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentifyResult {
    /// Canonical representative: when the sign is ambiguous its first
    /// nonzero coefficient is positive.
    pub poly: Poly,
    pub ambiguous_sign: bool,
    pub recovered_degree: usize,
}

impl IdentifyResult {
    /// Order of vanishing at the origin.
    pub fn k(&self) -> usize {
        self.poly.lowest_order().unwrap_or(0)
    }
}

/// How to report a leading coefficient whose root is irrational.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootMode {
    Exact,
    /// Fall back to a double-precision root (relative error below 1e-14).
    Approximate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LeadingCoefficient {
    Exact(Rational),
    Approximate(f64),
}

impl LeadingCoefficient {
    pub fn to_f64(&self) -> f64 {
        match self {
            LeadingCoefficient::Exact(r) => to_f64(r),
            LeadingCoefficient::Approximate(x) => *x,
        }
    }
}

/// `k = lead / (m - n)`, the order of vanishing of `f` at the origin.
pub fn infer_order(h: &RatioExpansion, spec: RatioSpec) -> Result<usize> {
    let step = -spec.gap();
    if h.lead % step != 0 {
        return Err(Error::InconsistentRatio(format!(
            "leading exponent {} is not a multiple of m - n = {step}",
            h.lead
        )));
    }
    let k = h.lead / step;
    if k < 0 {
        return Err(Error::InconsistentRatio(format!(
            "leading exponent {} implies a negative order {k}",
            h.lead
        )));
    }
    Ok(k as usize)
}

/// Solves `a^{n-m} = T_0 · (km)! · (k!)^{n-m} / (kn)!` for `a = f^{(k)}(0)`.
///
/// With `n - m` odd the real root is unique. With `n - m` even the positive
/// root is returned and the second flag is set, since `-a` fits equally well.
pub fn leading_coefficient(
    h: &RatioExpansion,
    spec: RatioSpec,
    k: usize,
    mode: RootMode,
) -> Result<(LeadingCoefficient, bool)> {
    let gap = spec.gap();
    let (n, m) = (spec.n as usize, spec.m as usize);
    let power_value = h.tail.coeff(0)
        * factorial_rational(k * m)
        * rational_powi(&factorial_rational(k), gap)
        / factorial_rational(k * n);
    // a^|gap| = value
    let value = if gap > 0 { power_value } else { power_value.recip() };
    let degree = gap.unsigned_abs() as u32;
    let ambiguous = spec.sign_ambiguous();
    if ambiguous && value.is_negative() {
        return Err(Error::NoRealRoot {
            value: value.to_string(),
        });
    }
    if let Some(root) = rational_root(&value, degree) {
        return Ok((LeadingCoefficient::Exact(root), ambiguous));
    }
    match mode {
        RootMode::Exact => Err(Error::IrrationalRoot {
            value: value.to_string(),
            degree,
        }),
        RootMode::Approximate => {
            let v = to_f64(&value);
            let root = libm::pow(v.abs(), 1.0 / f64::from(degree));
            Ok((LeadingCoefficient::Approximate(root.copysign(v)), ambiguous))
        }
    }
}

/// `n·B(k(n-1)+ℓ+1, km+1) - m·B(k(m-1)+ℓ+1, kn+1)`, the multiplier of the
/// unknown `c_ℓ` once the lower coefficients are matched. Nonzero whenever
/// `n ≠ m`.
pub fn pivot_value(k: usize, l: usize, spec: RatioSpec) -> Rational {
    assert!(l > k, "pivot needs ℓ > k (got k = {k}, ℓ = {l})");
    let (first, second) = pivot_terms(k, l, spec);
    first - second
}

/// Ratio of the two pivot terms; above one exactly when `n > m`.
pub fn pivot_ratio(k: usize, l: usize, spec: RatioSpec) -> Rational {
    assert!(l > k, "pivot needs ℓ > k (got k = {k}, ℓ = {l})");
    let (first, second) = pivot_terms(k, l, spec);
    first / second
}

fn pivot_terms(k: usize, l: usize, spec: RatioSpec) -> (Rational, Rational) {
    let (n, m) = (spec.n as u64, spec.m as u64);
    let (k, l) = (k as u64, l as u64);
    let beta = |a, b| beta_rational(a, b).expect("pivot beta arguments are positive");
    let first = beta(k * (n - 1) + l + 1, k * m + 1) * Rational::from_integer(n.into());
    let second = beta(k * (m - 1) + l + 1, k * n + 1) * Rational::from_integer(m.into());
    (first, second)
}

/// The next Taylor coefficient `c_ℓ`, `ℓ = k + state.coeffs.len()`.
pub fn next_coefficient(state: &IdentifyState, h: &RatioExpansion) -> Result<Rational> {
    let residual = matched_residual(state, h)?;
    assert!(
        !residual.slope.is_zero(),
        "vanishing pivot at k = {}, ℓ = {} for n = {}, m = {}",
        state.k,
        state.k + state.coeffs.len(),
        state.spec.n,
        state.spec.m
    );
    Ok(-residual.value / residual.slope)
}

/// Coefficient `ℓ - k` of `A - T·B` as a jet in the unknown `c_ℓ`.
fn matched_residual(state: &IdentifyState, h: &RatioExpansion) -> Result<Jet> {
    let j = state.coeffs.len();
    assert!(j > 0, "the leading coefficient comes from leading_coefficient");
    if h.order() < j {
        return Err(Error::InsufficientOrder {
            required: j,
            available: h.order(),
        });
    }
    let k = state.k;
    let (n, m) = (state.spec.n, state.spec.m);

    let mut base: Vec<Jet> = state.coeffs.iter().cloned().map(Jet::constant).collect();
    base.push(Jet::unknown());
    let transformed = |power: u32| -> Vec<Jet> {
        let shift = k * power as usize;
        let mut coeffs = jet_pow_truncated(&base, power, j + 1);
        coeffs.resize(j + 1, Jet::zero());
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&factorial_rational(shift + i)))
            .collect()
    };
    let numer = transformed(n);
    let denom = transformed(m);

    // Coefficient j of A - T·B.
    let mut residual = numer[j].clone();
    for (i, t) in h.tail.coeffs().iter().take(j + 1).enumerate() {
        residual = &residual - &denom[j - i].scale(t);
    }
    Ok(residual)
}

/// Recovers `f`'s Taylor coefficients through `target_degree` from `h`.
///
/// The tail must reach order `k(n+m-1) + target_degree + 1`.
pub fn identify(
    h: &RatioExpansion,
    spec: RatioSpec,
    target_degree: usize,
) -> Result<IdentifyResult> {
    let k = infer_order(h, spec)?;
    let required = spec.required_order(k, target_degree);
    if h.order() < required {
        return Err(Error::InsufficientOrder {
            required,
            available: h.order(),
        });
    }
    let (leading, ambiguous_sign) = leading_coefficient(h, spec, k, RootMode::Exact)?;
    let LeadingCoefficient::Exact(derivative) = leading else {
        unreachable!("exact mode never approximates");
    };
    let mut state = IdentifyState {
        k,
        coeffs: vec![derivative / factorial_rational(k)],
        ambiguous_sign,
        spec,
    };
    for _ in k + 1..=target_degree {
        let c = next_coefficient(&state, h)?;
        state.coeffs.push(c);
    }
    let mut coeffs = vec![Rational::zero(); k];
    coeffs.extend(state.coeffs);
    Ok(IdentifyResult {
        poly: Poly::new(coeffs),
        ambiguous_sign,
        recovered_degree: target_degree.max(k),
    })
}

/// Whether `f^n * g^m = f^m * g^n` holds exactly (convolution on the half
/// line), i.e. whether `f` and `g` share `H_{n,m}`.
pub fn verify_identity(f: &Poly, g: &Poly, spec: RatioSpec) -> bool {
    let lhs = f.pow(spec.n).convolve(&g.pow(spec.m));
    let rhs = f.pow(spec.m).convolve(&g.pow(spec.n));
    lhs == rhs
}

/// Degree up to which a recovered germ is fully determined, given a tail of
/// the stated order.
pub fn max_target_degree(spec: RatioSpec, k: usize, order: usize) -> Option<usize> {
    order.checked_sub(k * (spec.n + spec.m - 1) as usize + 1)
}
