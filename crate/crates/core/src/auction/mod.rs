//! Bids `X_i = X* + ε_i` with a common value `X*` and i.i.d. idiosyncratic
//! parts `ε_i ~ F`. The ratio
//!
//! ```text
//! K(F, λ) = E e^{-λ X_(N)} / E e^{-λ X_(N-1)}
//! ```
//!
//! of the transforms of the top two bids does not depend on the law of `X*`
//! and determines `F`.

mod dist;
mod monte_carlo;

pub use dist::DistSpec;
pub use monte_carlo::{
    chunk_count, chunk_rng, k_monte_carlo, ks_critical_value, ks_statistic, memoryless_check,
    memoryless_control, memoryless_samples, simulate_bids, simulate_chunk, BidPair, McConfig,
    Stream,
};

use alloc::format;

use crate::identify::{identify, IdentifyResult, RatioSpec};
use crate::quadrature::{integrate, Tolerance};
use crate::transform::RatioExpansion;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AuctionModel {
    pub common: DistSpec,
    pub idiosyncratic: DistSpec,
    bidders: u32,
}

impl AuctionModel {
    pub fn new(common: DistSpec, idiosyncratic: DistSpec, bidders: u32) -> Result<Self> {
        check_bidders(bidders)?;
        common.validate()?;
        idiosyncratic.validate()?;
        Ok(AuctionModel {
            common,
            idiosyncratic,
            bidders,
        })
    }

    /// `N`.
    pub fn bidders(&self) -> u32 {
        self.bidders
    }
}

fn check_bidders(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidBidderCount(n));
    }
    Ok(())
}

/// CDFs of the largest and second largest of `N` draws at a point where the
/// common CDF equals `f`: `(F^N, N F^{N-1} - (N-1) F^N)`.
pub fn order_stat_cdfs(f: f64, n: u32) -> Result<(f64, f64)> {
    check_bidders(n)?;
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::Domain(format!("CDF value {f} is outside [0, 1]")));
    }
    let below = libm::pow(f, f64::from(n - 1));
    let top = below * f;
    // N F^{N-1} - (N-1) F^N = F^{N-1} (N - (N-1) F), which stays in [top, 1].
    let second = (below * (f64::from(n) - f64::from(n - 1) * f)).min(1.0);
    Ok((top, second))
}

/// `K = h / (N + (N-1) h)`.
pub fn k_from_h(h: f64, n: u32) -> Result<f64> {
    check_bidders(n)?;
    if !(h >= 0.0) {
        return Err(Error::Domain(format!("h = {h} must be nonnegative")));
    }
    if h.is_infinite() {
        return Ok(1.0 / f64::from(n - 1));
    }
    Ok(h / (f64::from(n) + f64::from(n - 1) * h))
}

/// Inverse of [`k_from_h`]: `h = N K / (1 - (N-1) K)`.
pub fn h_from_k(k: f64, n: u32) -> Result<f64> {
    check_bidders(n)?;
    let bound = 1.0 / f64::from(n - 1);
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("k = {k} must be nonnegative")));
    }
    if k >= bound {
        return Err(Error::OutOfRange { k, bound });
    }
    Ok(f64::from(n) * k / (1.0 - f64::from(n - 1) * k))
}

/// `θ / (θ + λ)`: `K` when `ε` is exponential with rate `θ`, for every `N`.
pub fn k_analytic_exponential(theta: f64, lambda: f64) -> Result<f64> {
    if !(theta > 0.0) || !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "theta = {theta} and lambda = {lambda} must be positive"
        )));
    }
    Ok(theta / (theta + lambda))
}

/// `K(F, λ)` from the transforms of the order-statistic CDFs:
///
/// ```text
/// K = ∫ λ e^{-λx} F^N dx / ∫ λ e^{-λx} F^{N-1} (N - (N-1) F) dx
/// ```
///
/// Both integrals are taken over `[L, x_cut]`, with `L` the lower end of
/// `F`'s support and `e^{-λL}` factored out of both. Each is computed to a
/// relative accuracy of `tol / 8` and `x_cut` keeps the dropped tails below
/// `tol / 16` of the numerator, so the error in `K ≤ 1` stays under `tol`.
pub fn k_quadrature(model: &AuctionModel, lambda: f64, tol: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let n = model.bidders;
    let f = &model.idiosyncratic;
    let lower = f.lower_bound();
    let (nf, n1) = (f64::from(n), f64::from(n - 1));
    let top = |y: f64| {
        let fx = f.cdf(lower + y);
        lambda * libm::exp(-lambda * y) * libm::pow(fx, nf)
    };
    let second = |y: f64| {
        let fx = f.cdf(lower + y);
        lambda * libm::exp(-lambda * y) * libm::pow(fx, n1) * (nf - n1 * fx)
    };

    // Both integrands are at most N λ e^{-λy}, so the tail past b is at most
    // N e^{-λb}. Grow b until that is negligible next to the numerator.
    let coarse = Tolerance::relative(1e-3);
    let mut b = 16.0 / lambda;
    loop {
        let partial = integrate(top, 0.0, b, coarse)?.value;
        if partial > 0.0 && nf * libm::exp(-lambda * b) <= tol / 16.0 * partial {
            break;
        }
        if lambda * b > 1400.0 {
            return Err(Error::QuadratureFailure {
                requested: tol,
                estimated: f64::INFINITY,
            });
        }
        b *= 2.0;
    }
    let fine = Tolerance::relative(tol / 8.0);
    let numer = integrate(top, 0.0, b, fine)?.value;
    let denom = integrate(second, 0.0, b, fine)?.value;
    Ok(numer / denom)
}

/// Recovers the germ of `F` at the origin from the expansion of
/// `H_{N-1,N}(F, ·)`.
pub fn auction_identify(
    h: &RatioExpansion,
    bidders: u32,
    target_degree: usize,
) -> Result<IdentifyResult> {
    check_bidders(bidders)?;
    identify(h, RatioSpec::new(bidders - 1, bidders)?, target_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_rational, Poly};
    use crate::transform::ratio_expansion;

    fn exp_model(theta: f64, n: u32) -> AuctionModel {
        AuctionModel::new(
            DistSpec::point_mass(0.0).unwrap(),
            DistSpec::exponential(theta).unwrap(),
            n,
        )
        .unwrap()
    }

    #[test]
    fn model_needs_two_bidders() {
        let e = DistSpec::exponential(1.0).unwrap();
        assert_eq!(
            AuctionModel::new(e.clone(), e, 1),
            Err(Error::InvalidBidderCount(1))
        );
    }

    #[test]
    fn order_statistic_cdfs() {
        assert_eq!(order_stat_cdfs(0.5, 2).unwrap(), (0.25, 0.75));
        for n in 2..6 {
            assert_eq!(order_stat_cdfs(1.0, n).unwrap(), (1.0, 1.0));
            assert_eq!(order_stat_cdfs(0.0, n).unwrap(), (0.0, 0.0));
        }
        assert!(order_stat_cdfs(1.5, 2).is_err());
        assert!(order_stat_cdfs(-0.1, 2).is_err());
    }

    #[test]
    fn k_h_algebra() {
        assert_eq!(k_from_h(0.0, 3).unwrap(), 0.0);
        assert!((k_from_h(1.0, 2).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!((k_from_h(1e12, 2).unwrap() - 1.0).abs() < 1e-11);
        assert!(k_from_h(-1.0, 2).is_err());
        assert!((h_from_k(1.0 / 3.0, 2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(h_from_k(0.0, 4).unwrap(), 0.0);
        assert_eq!(
            h_from_k(0.6, 3),
            Err(Error::OutOfRange { k: 0.6, bound: 0.5 })
        );
    }

    #[test]
    fn exponential_closed_form() {
        assert_eq!(k_analytic_exponential(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(k_analytic_exponential(2.0, 2.0).unwrap(), 0.5);
        assert!((k_analytic_exponential(1.0, 1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!(k_analytic_exponential(0.0, 1.0).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let k = k_quadrature(&exp_model(1.0, 5), 1.0, 1e-10).unwrap();
        assert!((k - 0.5).abs() < 1e-10, "{k}");
        let k = k_quadrature(&exp_model(0.5, 10), 5.0, 1e-10).unwrap();
        assert!((k - 0.5 / 5.5).abs() < 1e-10, "{k}");
    }

    #[test]
    fn degenerate_idiosyncratic_part() {
        for v in [0.0, 3.0, 250.0] {
            let model = AuctionModel::new(
                DistSpec::exponential(1.0).unwrap(),
                DistSpec::point_mass(v).unwrap(),
                3,
            )
            .unwrap();
            for lambda in [0.1, 1.0, 20.0] {
                assert!((k_quadrature(&model, lambda, 1e-10).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shifting_epsilon_leaves_k_alone() {
        // Adding a constant to every ε shifts both order statistics.
        let base = DistSpec::lognormal(0.0, 1.0).unwrap();
        let shifted = DistSpec::shifted(base.clone(), -2.5).unwrap();
        let common = DistSpec::point_mass(0.0).unwrap();
        let a = k_quadrature(&AuctionModel::new(common.clone(), base, 3).unwrap(), 1.0, 1e-10);
        let b = k_quadrature(&AuctionModel::new(common, shifted, 3).unwrap(), 1.0, 1e-10);
        assert!((a.unwrap() - b.unwrap()).abs() < 1e-10);
    }

    #[test]
    fn identify_round_trips() {
        let q = |s: &str| parse_rational(s).unwrap();
        for (coeffs, n) in [
            (alloc::vec![q("0"), q("1")], 2),
            (alloc::vec![q("0"), q("1"), q("1/2")], 3),
        ] {
            let f = Poly::new(coeffs);
            let h = ratio_expansion(&f, n - 1, n, 12).unwrap();
            let r = auction_identify(&h, n, f.degree().unwrap()).unwrap();
            assert_eq!(r.poly, f);
        }
        let bad = RatioExpansion::new(-1, crate::algebra::Series::one(5)).unwrap();
        assert!(matches!(
            auction_identify(&bad, 3, 2),
            Err(Error::InconsistentRatio(_))
        ));
        assert_eq!(
            auction_identify(&bad, 1, 2),
            Err(Error::InvalidBidderCount(1))
        );
    }
}
