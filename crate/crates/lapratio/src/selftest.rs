//! The acceptance suite, runnable from the command line (`selftest`) and
//! from `cargo test --test acceptance`.

use std::fmt;
use std::time::{Duration, Instant};

use lapratio_core::algebra::{Poly, Rational};
use lapratio_core::auction::{
    h_from_k, k_analytic_exponential, k_from_h, k_monte_carlo, k_quadrature, ks_critical_value,
    memoryless_check, memoryless_control,
};
use lapratio_core::identify::{pivot_ratio, pivot_value, verify_identity};
use lapratio_core::transform::{
    maclaurin_sin, ratio_eval_piecewise, ratio_matches, ratio_rational, residual_q,
    shift_vanishing, sin_ratio_closed_form,
};
use lapratio_core::{
    identify, ratio_expansion, AuctionModel, DistSpec, McConfig, PiecewisePoly, RatioSpec,
};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::parallel::simulate_bids_parallel;

pub struct Report {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    /// Wall-clock budget; exceeding it fails the criterion.
    pub budget: Option<Duration>,
    run: fn() -> (bool, String),
}

impl Criterion {
    pub fn run(&self) -> Report {
        let start = Instant::now();
        let (mut passed, mut detail) = (self.run)();
        let elapsed = start.elapsed();
        if let Some(budget) = self.budget {
            if elapsed > budget {
                passed = false;
                detail = format!("{detail}; over the {} s budget", budget.as_secs_f64());
            }
        }
        Report {
            id: self.id,
            title: self.title,
            passed,
            detail,
            elapsed,
        }
    }
}

const fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, title: "sin ratio identity", budget: secs(1), run: sin_identity },
    Criterion { id: 2, title: "polynomial round trip, odd gap", budget: secs(30), run: odd_round_trip },
    Criterion { id: 3, title: "polynomial round trip, even gap", budget: secs(30), run: even_round_trip },
    Criterion { id: 4, title: "pivot sweep", budget: secs(10), run: pivot_sweep },
    Criterion { id: 5, title: "translation invariance", budget: None, run: translation_invariance },
    Criterion { id: 6, title: "residual equivalence", budget: None, run: residual_equivalence },
    Criterion { id: 7, title: "exponential auction K", budget: secs(60), run: exponential_k },
    Criterion { id: 8, title: "K-H round trip", budget: None, run: k_h_round_trip },
    Criterion { id: 9, title: "memoryless identity", budget: None, run: memoryless },
    Criterion { id: 10, title: "common-value invariance", budget: None, run: common_value_invariance },
];

pub fn run_all() -> Vec<Report> {
    CRITERIA.iter().map(Criterion::run).collect()
}

fn sin_identity() -> (bool, String) {
    match ratio_matches(&maclaurin_sin(17), 2, 1, &sin_ratio_closed_form(), 12) {
        Ok(ok) => (ok, "degree-17 Maclaurin polynomial, tail orders 0..=12, exact".into()),
        Err(e) => (false, e.to_string()),
    }
}

/// Degree in 0..=8, coefficients in -3..=3, nonzero leading coefficient.
fn random_polys(seed: u64, count: usize) -> Vec<Poly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let degree = rng.random_range(0..=8);
            let mut coeffs: Vec<i64> = (0..degree).map(|_| rng.random_range(-3..=3)).collect();
            let lead = loop {
                let c = rng.random_range(-3..=3);
                if c != 0 {
                    break c;
                }
            };
            coeffs.push(lead);
            Poly::from_ints(&coeffs)
        })
        .collect()
}

fn round_trip(f: &Poly, spec: RatioSpec) -> Result<(Poly, bool), String> {
    let degree = f.degree().expect("nonzero source");
    let k = f.lowest_order().expect("nonzero source");
    let h = ratio_expansion(f, spec.n(), spec.m(), spec.required_order(k, degree))
        .map_err(|e| e.to_string())?;
    let r = identify(&h, spec, degree).map_err(|e| e.to_string())?;
    Ok((r.poly, r.ambiguous_sign))
}

fn spec(n: u32, m: u32) -> RatioSpec {
    RatioSpec::new(n, m).expect("distinct positive exponents")
}

fn odd_round_trip() -> (bool, String) {
    let sources = random_polys(0x5eed_0002, 200);
    let specs = [spec(2, 1), spec(3, 2), spec(1, 2), spec(5, 2)];
    let mut failures = Vec::new();
    for (i, f) in sources.iter().enumerate() {
        for s in specs {
            match round_trip(f, s) {
                Ok((g, false)) if g == *f => {}
                Ok((g, amb)) => failures.push(format!("#{i} ({f}) {s:?}: got {g}, ambiguous {amb}")),
                Err(e) => failures.push(format!("#{i} ({f}) {s:?}: {e}")),
            }
        }
    }
    summarise(failures, sources.len() * specs.len())
}

fn even_round_trip() -> (bool, String) {
    let sources = random_polys(0x5eed_0003, 200);
    let specs = [spec(3, 1), spec(5, 3), spec(4, 2)];
    let mut failures = Vec::new();
    let mut negated = 0;
    for (i, f) in sources.iter().enumerate() {
        let leading_negative = f
            .coeffs()
            .iter()
            .find(|c| !c.is_zero())
            .is_some_and(Signed::is_negative);
        let canonical = if leading_negative { -f } else { f.clone() };
        for s in specs {
            match round_trip(f, s) {
                Ok((g, true)) if g == canonical => negated += usize::from(leading_negative),
                Ok((g, amb)) => failures.push(format!("#{i} ({f}) {s:?}: got {g}, ambiguous {amb}")),
                Err(e) => failures.push(format!("#{i} ({f}) {s:?}: {e}")),
            }
        }
    }
    let (ok, detail) = summarise(failures, sources.len() * specs.len());
    (ok, format!("{detail}, {negated} recovered as -source"))
}

fn summarise(failures: Vec<String>, total: usize) -> (bool, String) {
    match failures.first() {
        None => (true, format!("{total}/{total} recovered exactly")),
        Some(first) => (
            false,
            format!("{} of {total} failed, first: {first}", failures.len()),
        ),
    }
}

fn pivot_sweep() -> (bool, String) {
    let mut checked = 0;
    for n in 1..=10u32 {
        for m in (1..=10u32).filter(|&m| m != n) {
            let s = spec(n, m);
            for k in 0..=20usize {
                for l in k + 1..=k + 20 {
                    if pivot_value(k, l, s).is_zero() {
                        return (false, format!("zero pivot at k={k} ℓ={l} n={n} m={m}"));
                    }
                    if (pivot_ratio(k, l, s) > Rational::one()) != (n > m) {
                        return (false, format!("ratio on the wrong side of 1 at k={k} ℓ={l} n={n} m={m}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    (true, format!("{checked} pivots nonzero, ratio > 1 exactly when n > m"))
}

fn translation_invariance() -> (bool, String) {
    let quarter = Rational::new(1.into(), 4.into());
    let delayed = PiecewisePoly::step_example(10)
        .delay(&quarter)
        .expect("positive delay");
    let shifted = match shift_vanishing(&delayed, &quarter) {
        Ok(pp) => pp,
        Err(e) => return (false, e.to_string()),
    };
    let mut worst: f64 = 0.0;
    for (n, m) in [(2, 1), (3, 2)] {
        for lambda in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let a = ratio_eval_piecewise(&delayed, n, m, lambda);
            let b = ratio_eval_piecewise(&shifted, n, m, lambda);
            match (a, b) {
                (Ok(a), Ok(b)) => worst = worst.max((a - b).abs() / b.abs()),
                (Err(e), _) | (_, Err(e)) => return (false, e.to_string()),
            }
        }
    }
    (worst <= 1e-10, format!("max relative difference {worst:.3e} (limit 1e-10)"))
}

fn residual_equivalence() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let pool = random_polys(0x5eed_0106, 200);
    let specs = [spec(2, 1), spec(3, 1), spec(1, 2), spec(4, 2)];
    let mut equal = 0;
    for i in 0..100 {
        let f = &pool[i];
        let s = specs[i % specs.len()];
        // Mix of unrelated pairs, copies, negations and small perturbations.
        let g = match i % 4 {
            0 => pool[100 + i].clone(),
            1 => f.clone(),
            2 => -f,
            _ => {
                let bump = Poly::monomial(Rational::one(), rng.random_range(0..=8));
                f + &bump
            }
        };
        let by_convolution = verify_identity(f, &g, s);
        let closed = |p: &Poly| ratio_rational(p, s.n(), s.m()).expect("nonzero input");
        let by_closed_form = !g.is_zero() && closed(f) == closed(&g);
        if by_convolution != by_closed_form {
            return (false, format!("pair #{i} ({f} vs {g}, {s:?}) disagrees"));
        }
        equal += usize::from(by_closed_form);
    }

    let step = PiecewisePoly::step_example(10);
    let ramp = PiecewisePoly::new(
        vec![Rational::zero(), Rational::one(), Rational::from_integer(3.into())],
        vec![Poly::from_ints(&[0, 1]), Poly::from_ints(&[1, -1, 1])],
        Poly::from_ints(&[2]),
        false,
    )
    .expect("valid pieces");
    let mut worst: f64 = 0.0;
    for f in [&step, &ramp] {
        for (n, m) in [(2, 1), (3, 2)] {
            for t in (0..=50).map(|i| f64::from(i) * 0.1) {
                worst = worst.max(residual_q(f, f, n, m, t).abs());
            }
        }
    }
    (
        worst <= 1e-12,
        format!("100 pairs agree ({equal} equal); max |Q(f, f)| = {worst:.3e} (limit 1e-12)"),
    )
}

fn exponential_model(common: DistSpec, theta: f64, n: u32) -> AuctionModel {
    AuctionModel::new(
        common,
        DistSpec::exponential(theta).expect("positive rate"),
        n,
    )
    .expect("valid model")
}

fn exponential_k() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for theta in [0.5, 1.0, 2.0] {
        for n in [2, 5, 10] {
            let model = exponential_model(DistSpec::PointMass { value: 0.0 }, theta, n);
            for lambda in [0.5, 1.0, 2.0, 5.0] {
                let exact = k_analytic_exponential(theta, lambda).expect("positive");
                match k_quadrature(&model, lambda, 1e-10) {
                    Ok(k) => worst = worst.max((k - exact).abs()),
                    Err(e) => return (false, format!("θ={theta} N={n} λ={lambda}: {e}")),
                }
            }
        }
    }
    let model = exponential_model(DistSpec::PointMass { value: 0.0 }, 1.0, 5);
    let cfg = McConfig::new(1_000_000, 0x5eed_0007, 65_536).expect("valid config");
    let rows = simulate_bids_parallel(&model, &cfg);
    let (estimate, stderr) = k_monte_carlo(&rows, 1.0).expect("positive λ");
    let z = (estimate - 0.5).abs() / stderr;
    (
        worst <= 1e-10 && z < 3.0,
        format!(
            "max quadrature error {worst:.3e} (limit 1e-10); Monte Carlo {estimate:.6} ± {stderr:.2e}, {z:.2} stderr from 0.5"
        ),
    )
}

fn k_h_round_trip() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let h: f64 = rng.random_range(0.0..=100.0);
        let n = rng.random_range(2..=10);
        let back = k_from_h(h, n).and_then(|k| h_from_k(k, n));
        match back {
            Ok(b) if h > 0.0 => worst = worst.max((b - h).abs() / h),
            Ok(b) => worst = worst.max(b.abs()),
            Err(e) => return (false, format!("h={h} N={n}: {e}")),
        }
    }
    (worst <= 1e-12, format!("max relative error {worst:.3e} over 1000 draws (limit 1e-12)"))
}

fn memoryless() -> (bool, String) {
    let samples = 100_000;
    let critical = ks_critical_value(0.01, samples, samples);
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [2, 3, 5] {
        let cfg = McConfig::new(samples as u64, 0x5eed_0009 + u64::from(n), 8192).expect("valid");
        let (stat, control) = match (memoryless_check(1.0, n, &cfg), memoryless_control(1.0, n, &cfg)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return (false, e.to_string()),
        };
        ok &= stat < critical && control > critical;
        parts.push(format!("N={n}: D={stat:.4}, control {control:.4}"));
    }
    (ok, format!("{}; critical {critical:.4}", parts.join("; ")))
}

fn common_value_invariance() -> (bool, String) {
    let eps = DistSpec::lognormal(0.0, 1.0).expect("valid");
    let estimate = |common: DistSpec, seed: u64| {
        let model = AuctionModel::new(common, eps.clone(), 3).expect("valid model");
        let cfg = McConfig::new(1_000_000, seed, 65_536).expect("valid config");
        k_monte_carlo(&simulate_bids_parallel(&model, &cfg), 1.0).expect("positive λ")
    };
    let (a, sa) = estimate(DistSpec::PointMass { value: 0.0 }, 0x5eed_0a00);
    let (b, sb) = estimate(DistSpec::Exponential { theta: 1.0 }, 0x5eed_0a01);
    let combined = (sa * sa + sb * sb).sqrt();
    let z = (a - b).abs() / combined;
    (
        z < 3.0,
        format!("point mass {a:.6} vs exponential {b:.6}, difference {z:.2} combined stderr"),
    )
}
