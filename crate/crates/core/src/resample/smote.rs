use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::knn::k_nearest;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed;

/// Where a synthetic row came from: `base + u * (neighbor - base)`, indices
/// into the minority rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Origin {
    pub base: usize,
    pub neighbor: usize,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub rows: Matrix,
    pub origins: Vec<Origin>,
}

impl Synthetic {
    fn empty(n_cols: usize) -> Self {
        Synthetic {
            rows: Matrix::zeros(0, n_cols),
            origins: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }
}

fn check_k(n_minority: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if n_minority <= k {
        return Err(Error::InvalidInput(format!(
            "minority class has {n_minority} rows, which is not more than k = {k}; use k < {n_minority}"
        )));
    }
    Ok(())
}

/// Generates `counts[i]` points from each minority row `i`, in row order.
fn interpolate(z_min: &Matrix, neighbors: &[Vec<usize>], counts: &[usize], rng: &mut seed::Rng) -> Synthetic {
    let mut out = Synthetic::empty(z_min.n_cols());
    let mut row = vec![0.0; z_min.n_cols()];
    for (base, &count) in counts.iter().enumerate() {
        let x = z_min.row(base);
        for _ in 0..count {
            let neighbor = neighbors[base][rng.gen_range(0..neighbors[base].len())];
            let u: f64 = rng.gen();
            let nn = z_min.row(neighbor);
            for (j, v) in row.iter_mut().enumerate() {
                *v = x[j] + u * (nn[j] - x[j]);
            }
            out.rows.push_row(&row);
            out.origins.push(Origin { base, neighbor, u });
        }
    }
    out
}

/// Exactly `n_synthetic` SMOTE points. Every minority row serves as base
/// `n_synthetic / n` times; the remaining `n_synthetic % n` bases are
/// distinct rows drawn at random.
pub fn smote(z_min: &Matrix, k: usize, n_synthetic: usize, seed: u64) -> Result<Synthetic> {
    let m = z_min.n_rows();
    check_k(m, k)?;
    let mut rng = seed::rng(seed);
    let mut counts = vec![n_synthetic / m; m];
    for i in sample(&mut rng, m, n_synthetic % m) {
        counts[i] += 1;
    }
    let neighbors = k_nearest(z_min, z_min, k, true);
    Ok(interpolate(z_min, &neighbors, &counts, &mut rng))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdasynOutput {
    pub synthetic: Synthetic,
    /// Requested total `G`.
    pub total: f64,
    /// Normalized difficulty weight of each minority row.
    pub weights: Vec<f64>,
    /// Points generated per minority row.
    pub counts: Vec<usize>,
}

/// ADASYN with `G = (|majority| - |minority|) * beta`.
pub fn adasyn(z_min: &Matrix, z_maj: &Matrix, k: usize, beta: f64, seed: u64) -> Result<AdasynOutput> {
    let gap = z_maj.n_rows().saturating_sub(z_min.n_rows()) as f64;
    adasyn_total(z_min, z_maj, k, gap * beta, seed)
}

/// ADASYN generating about `total` points.
///
/// Each minority row is weighted by the share of majority rows among its
/// `k` nearest neighbors in the combined set, and seeds
/// `round(weight * total)` points interpolated toward minority neighbors.
/// With no majority neighbor anywhere the weights are uniform.
pub fn adasyn_total(z_min: &Matrix, z_maj: &Matrix, k: usize, total: f64, seed: u64) -> Result<AdasynOutput> {
    let m = z_min.n_rows();
    if z_maj.n_rows() == 0 {
        return Err(Error::InvalidInput("ADASYN needs a non-empty majority class".into()));
    }
    check_k(m, k)?;
    if !(total >= 0.0) {
        return Err(Error::InvalidInput(format!("synthetic total {total} is negative")));
    }
    let mut all = z_min.clone();
    all.append(z_maj);
    let hardness: Vec<f64> = k_nearest(z_min, &all, k, true)
        .iter()
        .map(|nn| nn.iter().filter(|&&i| i >= m).count() as f64 / k as f64)
        .collect();
    let sum: f64 = hardness.iter().sum();
    let weights: Vec<f64> = if sum > 0.0 {
        hardness.iter().map(|r| r / sum).collect()
    } else {
        vec![1.0 / m as f64; m]
    };
    let counts: Vec<usize> = weights.iter().map(|w| (w * total).round() as usize).collect();
    let neighbors = k_nearest(z_min, z_min, k, true);
    let mut rng = seed::rng(seed);
    let synthetic = interpolate(z_min, &neighbors, &counts, &mut rng);
    Ok(AdasynOutput {
        synthetic,
        total,
        weights,
        counts,
    })
}
