//! Nearest-neighbor mutual information between a continuous feature and a
//! discrete label (Ross 2014).
//!
//! For each point, `d` is the distance to its k-th nearest neighbor among
//! points with the same label and `m` is the number of points of any label
//! within `d`. Then `I = psi(N) + psi(k) - <psi(N_y)> - <psi(m)>` in nats.
//!
//! The estimator assumes distinct values. Count features repeat values
//! heavily, so the column is scaled to unit variance and perturbed by
//! noise of relative size 1e-10 from a fixed seed before estimation.

use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::seed;

const JITTER_SEED: u64 = 0x6d69_5f6a_6974;

/// Estimated mutual information in bits, clamped to be nonnegative.
///
/// Points whose label occurs only once carry no neighbor information and
/// are left out, as is usual for this estimator.
pub fn mutual_information(x: &[f64], y: &[bool], k: usize) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} values for {} labels",
            x.len(),
            y.len()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite feature value".into()));
    }
    let positives = y.iter().filter(|&&b| b).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::InvalidInput(
            "mutual information needs both label values".into(),
        ));
    }

    let x = jittered(x);
    let mut by_class: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (&v, &label) in x.iter().zip(y) {
        by_class[usize::from(label)].push(v);
    }
    for class in by_class.iter_mut() {
        class.sort_by(f64::total_cmp);
    }
    let usable: Vec<usize> = (0..2).filter(|&c| by_class[c].len() > 1).collect();
    let mut all: Vec<f64> = usable.iter().flat_map(|&c| by_class[c].iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    let n = all.len();

    let mut sum_psi_class = 0.0;
    let mut sum_psi_k = 0.0;
    let mut sum_psi_m = 0.0;
    for &c in &usable {
        let class = &by_class[c];
        let kc = k.min(class.len() - 1);
        let psi_class = digamma(class.len() as f64);
        let psi_k = digamma(kc as f64);
        for (pos, &v) in class.iter().enumerate() {
            let d = kth_neighbor_distance(class, pos, kc);
            let lo = all.partition_point(|&u| u < v - d);
            let hi = all.partition_point(|&u| u <= v + d);
            // Every point within d except the point itself.
            let m = (hi - lo - 1).max(1);
            sum_psi_class += psi_class;
            sum_psi_k += psi_k;
            sum_psi_m += digamma(m as f64);
        }
    }
    let nf = n as f64;
    let nats = digamma(nf) + (sum_psi_k - sum_psi_class - sum_psi_m) / nf;
    Ok((nats / std::f64::consts::LN_2).max(0.0))
}

fn jittered(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let scale = if sd > 0.0 { sd } else { 1.0 };
    let scaled: Vec<f64> = x.iter().map(|v| v / scale).collect();
    let amplitude = 1e-10 * (scaled.iter().map(|v| v.abs()).sum::<f64>() / n).max(1.0);
    let mut rng = seed::rng(JITTER_SEED);
    scaled
        .into_iter()
        .map(|v| {
            let e: f64 = StandardNormal.sample(&mut rng);
            v + amplitude * e
        })
        .collect()
}

/// Distance from `sorted[pos]` to its k-th nearest other element.
fn kth_neighbor_distance(sorted: &[f64], pos: usize, k: usize) -> f64 {
    let v = sorted[pos];
    let (mut left, mut right) = (pos, pos + 1);
    let mut d = 0.0;
    for _ in 0..k {
        let dl = (left > 0).then(|| v - sorted[left - 1]);
        let dr = (right < sorted.len()).then(|| sorted[right] - v);
        match (dl, dr) {
            (Some(a), Some(b)) if a <= b => {
                d = a;
                left -= 1;
            }
            (Some(a), None) => {
                d = a;
                left -= 1;
            }
            (_, Some(b)) => {
                d = b;
                right += 1;
            }
            (None, None) => break,
        }
    }
    d
}
