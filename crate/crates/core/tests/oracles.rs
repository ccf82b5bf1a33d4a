use lapratio_core::algebra::to_f64;
use lapratio_core::auction::{k_monte_carlo, k_quadrature, simulate_bids};
use lapratio_core::transform::{laplace_piecewise, ratio_eval_piecewise};
use lapratio_core::{AuctionModel, DistSpec, McConfig, PiecewisePoly};

/// Composite Simpson on `[a, b]` with `2 * half_steps` panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, half_steps: usize) -> f64 {
    let n = 2 * half_steps;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + inner + f(b)) * h / 3.0
}

/// Transform of `pp^power` at `λ`, integrating cell by cell. The last cell
/// runs far enough that the dropped tail is below 1e-16.
fn transform_oracle(pp: &PiecewisePoly, power: i32, lambda: f64) -> f64 {
    let mut edges: Vec<f64> = pp.breakpoints().iter().map(to_f64).collect();
    let last = *edges.last().unwrap();
    edges.push(last + 40.0 / lambda);
    edges
        .windows(2)
        .map(|w| {
            // Sample strictly inside the cell so the right-continuous jumps
            // at the edges are not picked up.
            let (a, b) = (w[0], w[1]);
            let eps = (b - a) * 1e-12;
            let g = |x: f64| libm::exp(-lambda * x) * pp.eval(x.clamp(a + eps, b - eps)).powi(power);
            simpson(g, a, b, 2000 * (b - a).ceil().max(1.0) as usize)
        })
        .sum()
}

#[test]
fn step_example_transform_matches_quadrature() {
    let pp = PiecewisePoly::step_example(10);
    for lambda in [0.5, 1.0, 3.0] {
        let exact = laplace_piecewise(&pp, lambda).unwrap();
        let oracle = transform_oracle(&pp, 1, lambda);
        assert!((exact - oracle).abs() < 1e-10, "λ = {lambda}: {exact} vs {oracle}");
    }
}

#[test]
fn step_example_ratio_matches_quadrature() {
    let pp = PiecewisePoly::step_example(10);
    let h = ratio_eval_piecewise(&pp, 2, 1, 1.0).unwrap();
    let oracle = transform_oracle(&pp, 2, 1.0) / transform_oracle(&pp, 1, 1.0);
    assert!((h - oracle).abs() < 1e-8 * oracle.abs(), "{h} vs {oracle}");
}

#[test]
fn lognormal_k_matches_monte_carlo() {
    let eps = DistSpec::lognormal(0.0, 1.0).unwrap();
    let model = AuctionModel::new(DistSpec::point_mass(0.0).unwrap(), eps, 3).unwrap();
    let k = k_quadrature(&model, 1.0, 1e-10).unwrap();
    let rows = simulate_bids(&model, &McConfig::new(200_000, 11, 8192).unwrap());
    let (estimate, stderr) = k_monte_carlo(&rows, 1.0).unwrap();
    assert!((estimate - k).abs() < 3.0 * stderr, "{estimate} ± {stderr} vs {k}");
    assert!(0.0 < k && k <= 1.0);
}

#[test]
fn k_is_free_of_the_common_value() {
    let eps = DistSpec::exponential(2.0).unwrap();
    for common in [
        DistSpec::point_mass(0.0).unwrap(),
        DistSpec::exponential(1.0).unwrap(),
        DistSpec::lognormal(-1.0, 0.5).unwrap(),
    ] {
        let model = AuctionModel::new(common, eps.clone(), 4).unwrap();
        let k = k_quadrature(&model, 1.5, 1e-10).unwrap();
        assert!((k - 2.0 / 3.5).abs() < 1e-10);
    }
}
