//! Ratios of Laplace transforms of powers of a function, and recovery of
//! the function's Taylor germ from such a ratio.
//!
//! For a function `f` on `[0, ∞)` and distinct positive integers `n`, `m`
//! the crate works with
//!
//! ```text
//! H_{n,m}(f, λ) = L{f^n}(λ) / L{f^m}(λ)
//! ```
//!
//! * [`algebra`] holds the exact scalar ([`Rational`]), dense polynomials,
//!   truncated power series and first-order jets everything else builds on.
//! * [`transform`] computes `H` exactly (as a series in `1/λ` or a rational
//!   function of `λ`) for polynomials, and numerically for piecewise
//!   polynomial (càdlàg) functions, together with the convolution residual.
//! * [`identify`] inverts the expansion: it recovers the Taylor coefficients
//!   of `f` at the origin one at a time, up to a global sign when `n - m` is
//!   even.
//! * [`auction`] covers the two-highest-bids model `X_i = X* + ε_i`, where
//!   the ratio of bid transforms determines the law of `ε`.
//!
//! The crate is `no_std` (it needs `alloc`). The default `std` feature only
//! adds a shared factorial cache.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod algebra;
pub mod auction;
mod error;
pub mod identify;
pub mod quadrature;
pub mod transform;

pub use algebra::{beta_rational, Jet, Poly, Rational, Series};
pub use auction::{AuctionModel, DistSpec, McConfig};
pub use error::{Error, Result};
pub use identify::{identify, IdentifyResult, RatioSpec};
pub use transform::{ratio_expansion, PiecewisePoly, RatioExpansion, RationalFunctionLambda};
