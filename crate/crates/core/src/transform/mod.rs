//! Laplace transforms of polynomial and piecewise-polynomial functions and
//! the ratio `H_{n,m}(f, λ) = L{f^n}(λ) / L{f^m}(λ)`.
//!
//! Polynomials are handled exactly: as a series in `u = 1/λ`
//! ([`ratio_expansion`]) or as a reduced rational function of `λ`
//! ([`ratio_rational`]). Piecewise polynomials are transformed in double
//! precision from closed-form per-piece integrals.

mod exact;
mod piecewise;

pub use exact::{
    eval_expansion, laplace_poly, maclaurin_sin, ratio_expansion, ratio_matches, ratio_rational,
    sin_ratio_check, sin_ratio_check_for, sin_ratio_closed_form, RatioExpansion,
    RationalFunctionLambda,
};
pub use piecewise::{
    convolve_at, laplace_piecewise, ratio_eval_piecewise, residual_q, shift_vanishing,
    PiecewisePoly,
};
