use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::algebra::{to_f64, Poly, Rational};
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};

/// A càdlàg function on `[0, ∞)` that is polynomial between breakpoints.
///
/// `pieces[i]` applies on `[breakpoints[i], breakpoints[i+1])` and `tail` on
/// `[breakpoints.last(), ∞)`. Every piece is written in the local variable
/// `s = x - start`, so shifting the function only relabels breakpoints.
///
/// The tail must be constant unless `unbounded_tail` is set, in which case a
/// polynomial tail (still of exponential order zero) is accepted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePoly {
    breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
    tail: Poly,
    unbounded_tail: bool,
}

impl PiecewisePoly {
    pub fn new(
        breakpoints: Vec<Rational>,
        pieces: Vec<Poly>,
        tail: Poly,
        unbounded_tail: bool,
    ) -> Result<Self> {
        if breakpoints.len() != pieces.len() + 1 {
            return Err(Error::InvalidPiecewise(format!(
                "{} breakpoints for {} finite pieces (need one more breakpoint than pieces)",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if !breakpoints[0].is_zero() {
            return Err(Error::InvalidPiecewise(format!(
                "breakpoints[0] must be 0, found {}",
                breakpoints[0]
            )));
        }
        if let Some(i) = (1..breakpoints.len()).find(|&i| breakpoints[i] <= breakpoints[i - 1]) {
            return Err(Error::InvalidPiecewise(format!(
                "breakpoints[{i}] = {} is not greater than breakpoints[{}] = {}",
                breakpoints[i],
                i - 1,
                breakpoints[i - 1]
            )));
        }
        if !unbounded_tail && tail.degree().is_some_and(|d| d > 0) {
            return Err(Error::InvalidPiecewise(
                "tail of positive degree needs the unbounded-tail flag".into(),
            ));
        }
        Ok(PiecewisePoly {
            breakpoints,
            pieces,
            tail,
            unbounded_tail,
        })
    }

    pub fn constant(c: Rational) -> Self {
        PiecewisePoly {
            breakpoints: vec![Rational::zero()],
            pieces: Vec::new(),
            tail: Poly::constant(c),
            unbounded_tail: false,
        }
    }

    /// A polynomial on the whole half line.
    pub fn from_poly(p: Poly) -> Self {
        let unbounded_tail = p.degree().is_some_and(|d| d > 0);
        PiecewisePoly {
            breakpoints: vec![Rational::zero()],
            pieces: Vec::new(),
            tail: p,
            unbounded_tail,
        }
    }

    /// `p(x)` on `[0, end)` and zero afterwards.
    pub fn truncated_poly(p: Poly, end: Rational) -> Result<Self> {
        PiecewisePoly::new(vec![Rational::zero(), end], vec![p], Poly::zero(), false)
    }

    /// Indicator of `[start, end)`; `end = None` means `[start, ∞)`.
    pub fn indicator(start: Rational, end: Option<Rational>) -> Result<Self> {
        let mut breakpoints = vec![Rational::zero()];
        let mut pieces = Vec::new();
        if start.is_positive() {
            breakpoints.push(start.clone());
            pieces.push(Poly::zero());
        }
        match end {
            Some(end) => {
                breakpoints.push(end);
                pieces.push(Poly::one());
                PiecewisePoly::new(breakpoints, pieces, Poly::zero(), false)
            }
            None => PiecewisePoly::new(breakpoints, pieces, Poly::one(), false),
        }
    }

    /// The staircase `f(x) = 2^-j` on `[1 - 2^-j, 1 - 2^-(j+1))`, `f = 2` on
    /// `[1, ∞)`, keeping the steps `j < n_max`; the last kept level `2^-n_max`
    /// fills `[1 - 2^-n_max, 1)`.
    pub fn step_example(n_max: u32) -> Self {
        let half = Rational::new(1.into(), 2.into());
        let mut breakpoints = Vec::new();
        let mut pieces = Vec::new();
        let mut level = Rational::one();
        for _ in 0..=n_max {
            // 1 - level marks where the current level starts.
            breakpoints.push(Rational::one() - &level);
            pieces.push(Poly::constant(level.clone()));
            level *= &half;
        }
        breakpoints.push(Rational::one());
        PiecewisePoly {
            breakpoints,
            pieces,
            tail: Poly::constant(Rational::from_integer(2.into())),
            unbounded_tail: false,
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn tail(&self) -> &Poly {
        &self.tail
    }

    pub fn unbounded_tail(&self) -> bool {
        self.unbounded_tail
    }

    pub fn is_zero(&self) -> bool {
        self.tail.is_zero() && self.pieces.iter().all(Poly::is_zero)
    }

    /// Pointwise power; each piece is powered exactly.
    pub fn pow(&self, n: u32) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.pow(n)).collect(),
            tail: self.tail.pow(n),
            unbounded_tail: self.unbounded_tail,
        }
    }

    pub fn scale(&self, factor: &Rational) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(factor)).collect(),
            tail: self.tail.scale(factor),
            unbounded_tail: self.unbounded_tail,
        }
    }

    /// Segment `(start, end, poly)` for every piece, `end = None` for the tail.
    fn segments(&self) -> impl Iterator<Item = (f64, Option<f64>, &Poly)> + '_ {
        let starts = self.breakpoints.iter().map(to_f64);
        let ends = self
            .breakpoints
            .iter()
            .skip(1)
            .map(|b| Some(to_f64(b)))
            .chain(core::iter::once(None));
        let polys = self.pieces.iter().chain(core::iter::once(&self.tail));
        starts
            .zip(ends)
            .zip(polys)
            .map(|((start, end), poly)| (start, end, poly))
    }

    /// Index of the piece containing `x` (`pieces.len()` is the tail).
    fn piece_index(&self, x: f64) -> usize {
        self.breakpoints
            .iter()
            .skip(1)
            .position(|b| x < to_f64(b))
            .unwrap_or(self.pieces.len())
    }

    fn piece(&self, index: usize) -> &Poly {
        self.pieces.get(index).unwrap_or(&self.tail)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.piece_index(x);
        self.piece(i).eval_f64(x - to_f64(&self.breakpoints[i]))
    }

    /// `θ_a f`: the function delayed by `a`, zero on `[0, a)`.
    pub fn delay(&self, a: &Rational) -> Result<PiecewisePoly> {
        if a.is_negative() {
            return Err(Error::Domain(format!("delay must be nonnegative, got {a}")));
        }
        if a.is_zero() {
            return Ok(self.clone());
        }
        let mut breakpoints = vec![Rational::zero()];
        breakpoints.extend(self.breakpoints.iter().map(|b| b + a));
        let mut pieces = vec![Poly::zero()];
        pieces.extend(self.pieces.iter().cloned());
        Ok(PiecewisePoly {
            breakpoints,
            pieces,
            tail: self.tail.clone(),
            unbounded_tail: self.unbounded_tail,
        })
    }
}

/// `θ_{-a} f(x) = f(x + a)` for an `f` vanishing on `[0, a)`.
pub fn shift_vanishing(pp: &PiecewisePoly, a: &Rational) -> Result<PiecewisePoly> {
    if a.is_negative() {
        return Err(Error::Domain(format!("shift must be nonnegative, got {a}")));
    }
    if a.is_zero() {
        return Ok(pp.clone());
    }
    let not_vanishing = || Error::NotVanishing {
        shift: a.to_string(),
    };
    let bps = &pp.breakpoints;
    // First piece whose interval reaches past a.
    let first = bps
        .iter()
        .skip(1)
        .position(|b| b > a)
        .unwrap_or(pp.pieces.len());
    if (0..first).any(|i| !pp.piece(i).is_zero()) {
        return Err(not_vanishing());
    }
    let start = &bps[first];
    let kept = pp.piece(first);
    if start < a && !kept.is_zero() {
        return Err(not_vanishing());
    }

    let mut breakpoints = vec![Rational::zero()];
    breakpoints.extend(bps.iter().skip(first + 1).map(|b| b - a));
    let mut pieces = Vec::new();
    if first < pp.pieces.len() {
        pieces.push(kept.clone());
        pieces.extend(pp.pieces.iter().skip(first + 1).cloned());
    }
    PiecewisePoly::new(breakpoints, pieces, pp.tail.clone(), pp.unbounded_tail)
}

/// `∫_0^w s^j e^{-λ s} ds = j!/λ^{j+1} · P(j+1, λw)` for `j = 0..=max_j`,
/// with `P` the regularised lower incomplete gamma function.
fn truncated_moments(lambda: f64, width: f64, max_j: usize) -> Vec<f64> {
    let x = lambda * width;
    let emx = libm::exp(-x);
    let mut out = Vec::with_capacity(max_j + 1);
    // j!/λ^{j+1}
    let mut scale = 1.0 / lambda;
    for j in 0..=max_j {
        if j > 0 {
            scale *= j as f64 / lambda;
        }
        let a = (j + 1) as f64;
        let p = if x < a {
            // P(a, x) = e^{-x} x^a / a! · Σ_i x^i / ((a+1)…(a+i))
            let mut lead = emx;
            for i in 1..=j + 1 {
                lead *= x / i as f64;
            }
            let mut term = 1.0;
            let mut sum = 1.0;
            let mut denom = a;
            loop {
                denom += 1.0;
                term *= x / denom;
                sum += term;
                if term < sum * 1e-17 {
                    break;
                }
            }
            lead * sum
        } else {
            // 1 - e^{-x} Σ_{i<a} x^i / i!
            let mut term = 1.0;
            let mut sum = 1.0;
            for i in 1..=j {
                term *= x / i as f64;
                sum += term;
            }
            1.0 - emx * sum
        };
        out.push(scale * p);
    }
    out
}

/// `∫_0^∞ s^j e^{-λ s} ds = j!/λ^{j+1}` for `j = 0..=max_j`.
fn full_moments(lambda: f64, max_j: usize) -> Vec<f64> {
    let mut scale = 1.0 / lambda;
    let mut out = Vec::with_capacity(max_j + 1);
    for j in 0..=max_j {
        if j > 0 {
            scale *= j as f64 / lambda;
        }
        out.push(scale);
    }
    out
}

/// `L{pp}(λ)`, summing closed-form per-piece integrals.
pub fn laplace_piecewise(pp: &PiecewisePoly, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::DivergentTransform { lambda });
    }
    let mut total = 0.0;
    for (start, end, poly) in pp.segments() {
        let Some(deg) = poly.degree() else { continue };
        let moments = match end {
            Some(end) => truncated_moments(lambda, end - start, deg),
            None => full_moments(lambda, deg),
        };
        let integral: f64 = poly
            .to_f64_coeffs()
            .iter()
            .zip(&moments)
            .map(|(c, mom)| c * mom)
            .sum();
        total += libm::exp(-lambda * start) * integral;
    }
    Ok(total)
}

/// `L{pp^n}(λ) / L{pp^m}(λ)`.
pub fn ratio_eval_piecewise(pp: &PiecewisePoly, n: u32, m: u32, lambda: f64) -> Result<f64> {
    let numer = laplace_piecewise(&pp.pow(n), lambda)?;
    let denom = laplace_piecewise(&pp.pow(m), lambda)?;
    if denom == 0.0 {
        return Err(Error::ZeroDenominator { lambda });
    }
    Ok(numer / denom)
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// `(F * G)(t) = ∫_0^t F(t - s) G(s) ds`, integrating exactly over every
/// cell between breakpoints of `G(s)` and of `F(t - s)`.
pub fn convolve_at(f: &PiecewisePoly, g: &PiecewisePoly, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let mut cuts: Vec<f64> = vec![0.0, t];
    cuts.extend(pp_cuts(g).filter(|&b| b > 0.0 && b < t));
    cuts.extend(pp_cuts(f).map(|b| t - b).filter(|&s| s > 0.0 && s < t));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut total = Neumaier::default();
    for cell in cuts.windows(2) {
        let (s0, s1) = (cell[0], cell[1]);
        let width = s1 - s0;
        if width <= 0.0 {
            continue;
        }
        let mid = 0.5 * (s0 + s1);
        let fi = f.piece_index(t - mid);
        let gi = g.piece_index(mid);
        let (fp, gp) = (f.piece(fi), g.piece(gi));
        let (Some(df), Some(dg)) = (fp.degree(), gp.degree()) else {
            continue;
        };
        // Both factors are evaluated in their own local variables, and the
        // rule is exact for the degree of their product.
        let (fc, gc) = (fp.to_f64_coeffs(), gp.to_f64_coeffs());
        let (f_start, g_start) = (to_f64(&f.breakpoints[fi]), to_f64(&g.breakpoints[gi]));
        let half = 0.5 * width;
        for (x, w) in gauss_legendre((df + dg) / 2 + 1) {
            let s = mid + half * x;
            total.add(w * half * horner(&fc, t - s - f_start) * horner(&gc, s - g_start));
        }
    }
    total.value()
}

/// Compensated running sum.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn pp_cuts(pp: &PiecewisePoly) -> impl Iterator<Item = f64> + '_ {
    pp.breakpoints.iter().skip(1).map(to_f64)
}

/// `Q(t) = (f^n * g^m)(t) - (f^m * g^n)(t)`, which vanishes identically
/// exactly when `f` and `g` have the same `H_{n,m}`.
pub fn residual_q(f: &PiecewisePoly, g: &PiecewisePoly, n: u32, m: u32, t: f64) -> f64 {
    let (fn_, fm) = (f.pow(n), f.pow(m));
    let (gn, gm) = (g.pow(n), g.pow(m));
    convolve_at(&fn_, &gm, t) - convolve_at(&fm, &gn, t)
}
