//! Adaptive Gauss–Kronrod (7/15-point) integration on a finite interval.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule: the summed error estimate must fall below
/// `max(abs, rel · |integral|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of subintervals kept.
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            abs: 0.0,
            rel,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

struct Cell {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Integrates `f` over `[a, b]`, repeatedly bisecting the subinterval with
/// the largest error estimate.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let first = kronrod(&mut f, a, b);
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Cell { a, b, est: first });
    loop {
        let target = tol.abs.max(tol.rel * total.value.abs());
        if total.error <= target {
            return Ok(total);
        }
        if !total.value.is_finite() || heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureFailure {
                requested: target,
                estimated: total.error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one cell");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in double precision.
            return Err(Error::QuadratureFailure {
                requested: target,
                estimated: total.error,
            });
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push(Cell { a: worst.a, b: mid, est: left });
        heap.push(Cell { a: mid, b: worst.b, est: right });
        // Running sums drift; refresh them once in a while.
        if heap.len() % 64 == 0 {
            total = heap.iter().fold(Estimate { value: 0.0, error: 0.0 }, |acc, c| Estimate {
                value: acc.value + c.est.value,
                error: acc.error + c.est.error,
            });
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// exact for polynomials of degree below `2n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0, "a rule needs at least one node");
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Newton's method from the standard cosine guess.
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let d = legendre(n, x).1;
        rule.push((x, 2.0 / ((1.0 - x * x) * d * d)));
    }
    rule
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_to_its_degree() {
        for n in 1..=24 {
            let rule = gauss_legendre(n);
            for d in 0..2 * n {
                let approx: f64 = rule.iter().map(|(x, w)| w * x.powi(d as i32)).sum();
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-14, "n={n} d={d}: {approx} vs {exact}");
            }
        }
    }

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x, 0.0, 2.0, Tolerance::relative(1e-14)).unwrap();
        assert!((r.value - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn smooth_integrands() {
        let r = integrate(libm::exp, -1.0, 3.0, Tolerance::relative(1e-13)).unwrap();
        let exact = libm::exp(3.0) - libm::exp(-1.0);
        assert!((r.value - exact).abs() < 1e-12 * exact);

        let r = integrate(|x| 1.0 / (1.0 + 100.0 * x * x), -1.0, 1.0, Tolerance::relative(1e-12))
            .unwrap();
        let exact = 2.0 * libm::atan(10.0) / 10.0;
        assert!((r.value - exact).abs() < 1e-11 * exact);
    }

    #[test]
    fn kinks_need_subdivision() {
        let r = integrate(|x: f64| x.abs().sqrt(), -1.0, 4.0, Tolerance::relative(1e-10)).unwrap();
        let exact = 2.0 / 3.0 * (1.0 + 8.0);
        assert!((r.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_intervals: 3,
        };
        let r = integrate(|x: f64| libm::sin(1.0 / x), 1e-3, 1.0, tol);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
