use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Poly, Rational};
use crate::{Error, Result};

/// Power series truncated at an explicit order `D`: `coeffs[i]` for
/// `i = 0..=D` are known, everything beyond is `O(u^(D+1))`.
///
/// Binary operations on series of different orders truncate to the smaller
/// one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series {
    coeffs: Vec<Rational>,
}

impl Series {
    /// Pads with zeros or truncates so that exactly `order + 1` coefficients
    /// are kept.
    pub fn new(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        Series { coeffs }
    }

    pub fn from_poly(p: &Poly, order: usize) -> Self {
        Series::new(p.coeffs().to_vec(), order)
    }

    pub fn zero(order: usize) -> Self {
        Series::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Series::new(vec![Rational::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn truncate(&self, order: usize) -> Series {
        Series::new(self.coeffs[..=order.min(self.order())].to_vec(), order.min(self.order()))
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn scale(&self, factor: &Rational) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Formal quotient `self / denom` to the common order.
    pub fn div(&self, denom: &Series) -> Result<Series> {
        let lead = denom.coeffs[0].clone();
        if lead.is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let order = self.order().min(denom.order());
        let inv_lead = lead.recip();
        let mut quot: Vec<Rational> = Vec::with_capacity(order + 1);
        for i in 0..=order {
            let mut acc = self.coeffs[i].clone();
            for j in 1..=i {
                let d = &denom.coeffs[j];
                if !d.is_zero() {
                    acc -= d * &quot[i - j];
                }
            }
            quot.push(acc * &inv_lead);
        }
        Ok(Series { coeffs: quot })
    }
}

impl Add for &Series {
    type Output = Series;

    fn add(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        Series {
            coeffs: (0..=order).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub for &Series {
    type Output = Series;

    fn sub(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        Series {
            coeffs: (0..=order).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
        }
    }
}

impl Neg for &Series {
    type Output = Series;

    fn neg(self) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Series {
    type Output = Series;

    fn mul(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(order + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }
}
