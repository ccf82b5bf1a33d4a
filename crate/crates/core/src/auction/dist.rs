use alloc::boxed::Box;
use alloc::format;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::{Error, Result};

/// Law of a bid component.
#[derive(Clone, Debug, PartialEq)]
pub enum DistSpec {
    /// Rate `theta`: `F(x) = 1 - e^{-θx}` on `x ≥ 0`.
    Exponential { theta: f64 },
    /// `exp(σZ - μ)` with `Z` standard normal.
    Lognormal { mu: f64, sigma: f64 },
    PointMass { value: f64 },
    Shifted { base: Box<DistSpec>, offset: f64 },
}

impl DistSpec {
    pub fn exponential(theta: f64) -> Result<Self> {
        let d = DistSpec::Exponential { theta };
        d.validate()?;
        Ok(d)
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        let d = DistSpec::Lognormal { mu, sigma };
        d.validate()?;
        Ok(d)
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        let d = DistSpec::PointMass { value };
        d.validate()?;
        Ok(d)
    }

    pub fn shifted(base: DistSpec, offset: f64) -> Result<Self> {
        let d = DistSpec::Shifted {
            base: Box::new(base),
            offset,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::Domain(format!("{what} = {v} is out of range")));
        match self {
            DistSpec::Exponential { theta } if !(*theta > 0.0 && theta.is_finite()) => {
                bad("exponential theta", *theta)
            }
            DistSpec::Lognormal { mu, .. } if !mu.is_finite() => bad("lognormal mu", *mu),
            DistSpec::Lognormal { sigma, .. } if !(*sigma > 0.0 && sigma.is_finite()) => {
                bad("lognormal sigma", *sigma)
            }
            DistSpec::PointMass { value } if !(*value >= 0.0 && value.is_finite()) => {
                bad("point mass value", *value)
            }
            DistSpec::Shifted { offset, .. } if !offset.is_finite() => bad("shift offset", *offset),
            DistSpec::Shifted { base, .. } => base.validate(),
            _ => Ok(()),
        }
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            DistSpec::Exponential { theta } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -libm::expm1(-theta * x)
                }
            }
            DistSpec::Lognormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let z = (libm::log(x) + mu) / sigma;
                    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
                }
            }
            DistSpec::PointMass { value } => {
                if x >= *value {
                    1.0
                } else {
                    0.0
                }
            }
            DistSpec::Shifted { base, offset } => base.cdf(x - offset),
        }
    }

    /// Left end of the support.
    pub fn lower_bound(&self) -> f64 {
        match self {
            DistSpec::Exponential { .. } | DistSpec::Lognormal { .. } => 0.0,
            DistSpec::PointMass { value } => *value,
            DistSpec::Shifted { base, offset } => base.lower_bound() + offset,
        }
    }

    /// Assumes [`DistSpec::validate`] has passed.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            DistSpec::Exponential { theta } => Exp::new(*theta).expect("validated rate").sample(rng),
            DistSpec::Lognormal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                libm::exp(sigma * z - mu)
            }
            DistSpec::PointMass { value } => *value,
            DistSpec::Shifted { base, offset } => base.sample(rng) + offset,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn validation() {
        assert!(DistSpec::exponential(0.0).is_err());
        assert!(DistSpec::lognormal(0.0, -1.0).is_err());
        assert!(DistSpec::point_mass(-1.0).is_err());
        assert!(DistSpec::shifted(DistSpec::Exponential { theta: -1.0 }, 1.0).is_err());
        assert!(DistSpec::shifted(DistSpec::lognormal(1.0, 0.5).unwrap(), -2.0).is_ok());
    }

    #[test]
    fn cdf_values() {
        let e = DistSpec::exponential(2.0).unwrap();
        assert_eq!(e.cdf(-1.0), 0.0);
        assert!((e.cdf(1.0) - (1.0 - libm::exp(-2.0))).abs() < 1e-16);
        // Median of exp(σZ - μ) is e^{-μ}.
        let l = DistSpec::lognormal(0.7, 1.3).unwrap();
        assert!((l.cdf(libm::exp(-0.7)) - 0.5).abs() < 1e-15);
        let p = DistSpec::point_mass(1.5).unwrap();
        assert_eq!((p.cdf(1.4), p.cdf(1.5)), (0.0, 1.0));
        let s = DistSpec::shifted(e.clone(), 3.0).unwrap();
        assert_eq!(s.cdf(4.0), e.cdf(1.0));
        assert_eq!(s.lower_bound(), 3.0);
    }

    #[test]
    fn lognormal_sign_convention() {
        // With μ = 2 draws concentrate around e^{-2}, not e^{2}.
        let d = DistSpec::lognormal(2.0, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mean: f64 = (0..10_000).map(|_| d.sample(&mut rng)).sum::<f64>() / 10_000.0;
        assert!((mean - libm::exp(-2.0 + 0.005)).abs() < 2e-3, "{mean}");
    }

    #[test]
    fn exponential_uses_rate() {
        let d = DistSpec::exponential(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
        // sd of the mean is 0.25/sqrt(n) ≈ 5.6e-4
        assert!((mean - 0.25).abs() < 3e-3, "{mean}");
    }
}
