//! Parallel drivers. Work is split along the same chunks (or grid points)
//! the sequential code uses, so results match it exactly.

use lapratio_core::auction::{chunk_count, simulate_chunk, BidPair};
use lapratio_core::{AuctionModel, McConfig};
use rayon::prelude::*;

pub fn simulate_bids_parallel(model: &AuctionModel, cfg: &McConfig) -> Vec<BidPair> {
    let chunks: Vec<Vec<BidPair>> = (0..chunk_count(cfg))
        .into_par_iter()
        .map(|i| simulate_chunk(model, cfg, i))
        .collect();
    chunks.concat()
}

/// Evaluates `f` at every grid point, keeping the grid order.
pub fn map_grid<T, E, F>(grid: &[f64], f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(f64) -> Result<T, E> + Sync,
{
    grid.par_iter().map(|&x| f(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use lapratio_core::auction::simulate_bids;
    use lapratio_core::DistSpec;

    #[test]
    fn parallel_equals_sequential() {
        let model = AuctionModel::new(
            DistSpec::exponential(1.0).unwrap(),
            DistSpec::lognormal(0.3, 0.8).unwrap(),
            4,
        )
        .unwrap();
        for chunk in [1, 7, 1000, 5000] {
            let cfg = McConfig::new(3001, 99, chunk).unwrap();
            assert_eq!(simulate_bids_parallel(&model, &cfg), simulate_bids(&model, &cfg));
        }
    }

    #[test]
    fn grid_order_is_kept() {
        let grid: Vec<f64> = (1..200).map(f64::from).collect();
        let out: Result<Vec<f64>, ()> = map_grid(&grid, |x| Ok(x * 2.0));
        assert_eq!(out.unwrap(), grid.iter().map(|x| x * 2.0).collect::<Vec<_>>());
    }
}
