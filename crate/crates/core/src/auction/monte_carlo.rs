use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::{check_bidders, AuctionModel, DistSpec};
use crate::{Error, Result};

/// Monte Carlo settings. Row `r` is drawn from the stream of chunk
/// `r / chunk`, so output depends only on these three numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    samples: u64,
    seed: u64,
    chunk: u64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64, chunk: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Domain("sample count must be positive".into()));
        }
        if chunk == 0 {
            return Err(Error::Domain("chunk size must be positive".into()));
        }
        Ok(McConfig {
            samples,
            seed,
            chunk,
        })
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn chunk(&self) -> u64 {
        self.chunk
    }
}

/// Disjoint families of streams under one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Bids = 0,
    MemorylessTop = 1,
    MemorylessSecond = 2,
}

/// Generator for one chunk: a ChaCha8 keystream selected by the seed, the
/// stream family and the chunk index.
pub fn chunk_rng(seed: u64, family: Stream, chunk_index: u64) -> ChaCha8Rng {
    assert!(chunk_index < 1 << 56, "chunk index {chunk_index} too large");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((family as u64) << 56) | chunk_index);
    rng
}

pub fn chunk_count(cfg: &McConfig) -> u64 {
    cfg.samples.div_ceil(cfg.chunk)
}

fn chunk_rows(cfg: &McConfig, index: u64) -> u64 {
    let start = index * cfg.chunk;
    cfg.chunk.min(cfg.samples.saturating_sub(start))
}

/// The two largest bids of one auction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BidPair {
    pub top: f64,
    pub second: f64,
}

fn top_two(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut top = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for v in values {
        if v > top {
            second = top;
            top = v;
        } else if v > second {
            second = v;
        }
    }
    (top, second)
}

/// Rows of chunk `index`. Each row draws `X*`, then `ε_1..ε_N`.
pub fn simulate_chunk(model: &AuctionModel, cfg: &McConfig, index: u64) -> Vec<BidPair> {
    let mut rng = chunk_rng(cfg.seed, Stream::Bids, index);
    (0..chunk_rows(cfg, index))
        .map(|_| {
            let common = model.common.sample(&mut rng);
            let eps = &model.idiosyncratic;
            let (top, second) =
                top_two((0..model.bidders).map(|_| common + eps.sample(&mut rng)));
            BidPair { top, second }
        })
        .collect()
}

pub fn simulate_bids(model: &AuctionModel, cfg: &McConfig) -> Vec<BidPair> {
    (0..chunk_count(cfg))
        .flat_map(|i| simulate_chunk(model, cfg, i))
        .collect()
}

/// Ratio of the sample means of `e^{-λ X_(N)}` and `e^{-λ X_(N-1)}` with its
/// delta-method standard error. The standard error is NaN for one row.
pub fn k_monte_carlo(samples: &[BidPair], lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(alloc::format!("lambda = {lambda} must be positive")));
    }
    if samples.is_empty() {
        return Err(Error::Domain("empty sample table".into()));
    }
    // Rescaling both means by e^{λ c} keeps them away from underflow.
    let c = samples.iter().map(|p| p.second).fold(f64::INFINITY, f64::min);
    let weight = |x: f64| libm::exp(-lambda * (x - c));
    let n = samples.len() as f64;
    let (sum_a, sum_b) = samples.iter().fold((0.0, 0.0), |(a, b), p| {
        (a + weight(p.top), b + weight(p.second))
    });
    let ratio = sum_a / sum_b;
    let mean_b = sum_b / n;
    let ss: f64 = samples
        .iter()
        .map(|p| {
            let d = weight(p.top) - ratio * weight(p.second);
            d * d
        })
        .sum();
    let stderr = libm::sqrt(ss / (n * (n - 1.0))) / mean_b;
    Ok((ratio, stderr))
}

/// Independent samples of `ε_(N)` and of `ε_(N-1) + η`, with `ε` and `η`
/// exponential with rate `θ` (the `η` term dropped when `add_eta` is false).
/// The two sides use disjoint streams.
pub fn memoryless_samples(
    theta: f64,
    bidders: u32,
    cfg: &McConfig,
    add_eta: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_bidders(bidders)?;
    DistSpec::exponential(theta)?;
    let exp = Exp::new(theta).expect("validated rate");
    let side = |family: Stream, pick_second: bool| -> Vec<f64> {
        (0..chunk_count(cfg))
            .flat_map(|i| {
                let mut rng = chunk_rng(cfg.seed, family, i);
                (0..chunk_rows(cfg, i))
                    .map(|_| {
                        let (top, second) =
                            top_two((0..bidders).map(|_| exp.sample(&mut rng)));
                        if !pick_second {
                            top
                        } else if add_eta {
                            second + exp.sample(&mut rng)
                        } else {
                            second
                        }
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    Ok((side(Stream::MemorylessTop, false), side(Stream::MemorylessSecond, true)))
}

/// Two-sample Kolmogorov–Smirnov statistic between `ε_(N)` and
/// `ε_(N-1) + η`.
pub fn memoryless_check(theta: f64, bidders: u32, cfg: &McConfig) -> Result<f64> {
    let (top, second) = memoryless_samples(theta, bidders, cfg, true)?;
    Ok(ks_statistic(top, second))
}

/// As [`memoryless_check`] without `η`; the laws differ, so the statistic
/// should be large.
pub fn memoryless_control(theta: f64, bidders: u32, cfg: &McConfig) -> Result<f64> {
    let (top, second) = memoryless_samples(theta, bidders, cfg, false)?;
    Ok(ks_statistic(top, second))
}

/// `sup_x |F̂_a(x) - F̂_b(x)|` for the empirical CDFs of two samples.
pub fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut gap: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        gap = gap.max((i as f64 / na - j as f64 / nb).abs());
    }
    gap
}

/// Asymptotic two-sample critical value at level `alpha`,
/// `sqrt(-ln(α/2)/2) · sqrt((n1 + n2) / (n1 n2))`.
pub fn ks_critical_value(alpha: f64, n1: usize, n2: usize) -> f64 {
    let (n1, n2) = (n1 as f64, n2 as f64);
    libm::sqrt(-libm::log(alpha / 2.0) / 2.0) * libm::sqrt((n1 + n2) / (n1 * n2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(common: DistSpec, eps: DistSpec, n: u32) -> AuctionModel {
        AuctionModel::new(common, eps, n).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(0, 1, 1).is_err());
        assert!(McConfig::new(1, 1, 0).is_err());
        let cfg = McConfig::new(10, 1, 4).unwrap();
        assert_eq!(chunk_count(&cfg), 3);
        assert_eq!(
            (0..3).map(|i| chunk_rows(&cfg, i)).collect::<Vec<_>>(),
            [4, 4, 2]
        );
    }

    #[test]
    fn degenerate_rows() {
        let m = model(
            DistSpec::point_mass(1.5).unwrap(),
            DistSpec::point_mass(2.0).unwrap(),
            4,
        );
        let rows = simulate_bids(&m, &McConfig::new(50, 9, 7).unwrap());
        assert_eq!(rows.len(), 50);
        assert!(rows.iter().all(|p| *p == BidPair { top: 3.5, second: 3.5 }));
        assert_eq!(k_monte_carlo(&rows, 1.0).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn deterministic_and_chunked() {
        let m = model(
            DistSpec::exponential(1.0).unwrap(),
            DistSpec::lognormal(0.0, 1.0).unwrap(),
            3,
        );
        let cfg = McConfig::new(1000, 42, 64).unwrap();
        let rows = simulate_bids(&m, &cfg);
        assert_eq!(rows, simulate_bids(&m, &cfg));
        let mut pieced = Vec::new();
        for i in (0..chunk_count(&cfg)).rev() {
            let mut part = simulate_chunk(&m, &cfg, i);
            part.extend(pieced);
            pieced = part;
        }
        assert_eq!(rows, pieced);
        assert!(rows.iter().all(|p| p.top >= p.second));
        assert_ne!(rows, simulate_bids(&m, &McConfig::new(1000, 43, 64).unwrap()));
    }

    #[test]
    fn exponential_gap_has_mean_one_over_theta() {
        let m = model(
            DistSpec::point_mass(0.0).unwrap(),
            DistSpec::exponential(1.0).unwrap(),
            2,
        );
        let rows = simulate_bids(&m, &McConfig::new(200_000, 5, 4096).unwrap());
        let gaps: Vec<f64> = rows.iter().map(|p| p.top - p.second).collect();
        let n = gaps.len() as f64;
        let mean = gaps.iter().sum::<f64>() / n;
        let var = gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (n - 1.0);
        assert!((mean - 1.0).abs() < 3.0 * libm::sqrt(var / n), "{mean}");
    }

    #[test]
    fn monte_carlo_rejects_bad_input() {
        let row = [BidPair { top: 1.0, second: 0.0 }];
        assert!(k_monte_carlo(&row, 0.0).is_err());
        assert!(k_monte_carlo(&[], 1.0).is_err());
    }

    #[test]
    fn ks_statistic_examples() {
        assert_eq!(ks_statistic(vec![1.0, 2.0], vec![1.0, 2.0]), 0.0);
        assert_eq!(ks_statistic(vec![1.0, 2.0], vec![3.0, 4.0]), 1.0);
        assert_eq!(ks_statistic(vec![1.0, 3.0], vec![2.0, 4.0]), 0.5);
        // Ties across samples are stepped together.
        assert_eq!(ks_statistic(vec![1.0, 1.0, 2.0], vec![1.0, 2.0, 2.0]), 1.0 / 3.0);
        let c = ks_critical_value(0.01, 100_000, 100_000);
        assert!((c - 1.6276 * libm::sqrt(2.0 / 1e5)).abs() < 1e-6);
    }
}
