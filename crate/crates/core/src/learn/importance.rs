use rand::seq::SliceRandom;

use super::forest::normalize;
use super::search::accuracy;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::seed;

/// Mean accuracy drop when one column is shuffled, over `repeats` seeded
/// shuffles per column. Negative drops count as zero and the result is
/// normalized to sum to 1 (uniform when no column matters).
pub fn permutation_importance<F>(predict: F, x: &Matrix, y: &[bool], repeats: usize, seed: u64) -> Result<Vec<f64>>
where
    F: Fn(&Matrix) -> Result<Vec<f64>>,
{
    let baseline = accuracy(&predict(x)?, y);
    let mut drops = Vec::with_capacity(x.n_cols());
    for j in 0..x.n_cols() {
        let mut rng = seed::rng(seed::derive_index(seed, j as u64));
        let mut total = 0.0;
        for _ in 0..repeats.max(1) {
            let mut column = x.column(j);
            column.shuffle(&mut rng);
            let mut shuffled = x.clone();
            for (i, v) in column.into_iter().enumerate() {
                shuffled.set(i, j, v);
            }
            total += baseline - accuracy(&predict(&shuffled)?, y);
        }
        drops.push((total / repeats.max(1) as f64).max(0.0));
    }
    Ok(normalize(&drops))
}
