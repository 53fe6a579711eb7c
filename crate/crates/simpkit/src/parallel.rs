//! Grid search that spreads grid points over threads when the generator
//! allows concurrent batches.

use rayon::prelude::*;
use simpkit_core::corpus::SentencePair;
use simpkit_core::search::{
    evaluate_point, grid_search, select_best, CtGrid, Generator, GridPoint, LrPolicy, SearchReport,
    SearchStrategy,
};
use simpkit_core::Error;

/// Same result as [`grid_search`]; exhaustive searches with a concurrent
/// generator evaluate points in parallel.
pub fn grid_search_parallel<G: Generator + Sync + ?Sized>(
    generator: &G,
    val_pairs: &[SentencePair],
    grid: &CtGrid,
    lr_policy: LrPolicy<'_>,
    strategy: SearchStrategy,
) -> simpkit_core::Result<SearchReport> {
    if strategy != SearchStrategy::Exhaustive || !generator.supports_concurrent_batches() {
        return grid_search(generator, val_pairs, grid, lr_policy, strategy);
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty search grid".into()));
    }
    let lrs = lr_policy.values(val_pairs)?;
    let points: Vec<_> = grid.points().collect();
    let points = points
        .into_par_iter()
        .map(|p| {
            evaluate_point(generator, val_pairs, p, &lrs).map(|sari| GridPoint {
                dtd: p.dtd,
                wr: p.wr,
                lv: p.lv,
                sari,
            })
        })
        .collect::<simpkit_core::Result<Vec<_>>>()?;
    let best = select_best(&points).expect("grid is non-empty");
    Ok(SearchReport {
        best: best.tokens(),
        best_sari: best.sari,
        points,
    })
}
