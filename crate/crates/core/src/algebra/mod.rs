//! Exact arithmetic: rationals, dense polynomials, truncated power series
//! and first-order jets.

mod jet;
mod poly;
mod rational;
mod series;

pub use jet::{jet_poly_pow, jet_pow_truncated, Jet};
pub use poly::Poly;
pub use rational::{
    beta_rational, factorial, factorial_rational, parse_rational, rational_from_int,
    rational_powi, rational_root, to_f64, Rational,
};
pub use series::Series;
