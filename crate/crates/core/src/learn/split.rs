use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.7,
            seed: 0,
        }
    }
}

/// Row indices of the two partitions, each in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded shuffle of `0..n`; the first `floor(n * train_fraction)` indices
/// form the training partition.
pub fn split_train_test(n: usize, spec: &SplitSpec) -> Result<Partition> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "split.train_fraction must be in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("cannot split {n} rows")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(spec.seed));
    let n_train = (n as f64 * spec.train_fraction).floor() as usize;
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(Partition { train, test })
}

/// `k` folds stratified by label: each class is shuffled and dealt
/// round-robin. Each fold lists positions into `y`, ascending.
pub fn stratified_folds(y: &[bool], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {k}")));
    }
    let mut rng = seed::rng(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for label in [false, true] {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == label).collect();
        if members.len() < k {
            return Err(Error::Data(format!(
                "class {label} has {} rows, fewer than {k} folds",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for i in members {
            folds[next % k].push(i);
            next += 1;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Positions not in `fold`, ascending.
pub fn complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut held = vec![false; n];
    for &i in fold {
        held[i] = true;
    }
    (0..n).filter(|&i| !held[i]).collect()
}
