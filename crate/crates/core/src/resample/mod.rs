//! Oversampling of the minority class in a training partition.

mod knn;
mod scaler;
mod smote;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use knn::k_nearest;
pub use scaler::{standardize, Scaler};
pub use smote::{adasyn, adasyn_total, smote, AdasynOutput, Origin, Synthetic};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    None,
    Smote,
    Adasyn,
}

impl SamplerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::None => "none",
            SamplerKind::Smote => "smote",
            SamplerKind::Adasyn => "adasyn",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(SamplerKind::None),
            "smote" => Ok(SamplerKind::Smote),
            "adasyn" => Ok(SamplerKind::Adasyn),
            other => Err(Error::Config(format!(
                "unknown sampler {other:?} (expected none, smote or adasyn)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResamplePlan {
    pub method: SamplerKind,
    pub k: usize,
    /// Minority/majority ratio after sampling.
    pub target_ratio: f64,
    pub beta: f64,
    pub seed: u64,
}

impl Default for ResamplePlan {
    fn default() -> Self {
        ResamplePlan {
            method: SamplerKind::Smote,
            k: 5,
            target_ratio: 1.0,
            beta: 1.0,
            seed: 0,
        }
    }
}

impl ResamplePlan {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("resample k must be at least 1".into()));
        }
        if !(self.target_ratio > 0.0 && self.target_ratio <= 1.0) {
            return Err(Error::Config(format!(
                "resample ratio must be in (0, 1], got {}",
                self.target_ratio
            )));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!(
                "resample beta must be in [0, 1], got {}",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ResamplePlan { seed, ..self }
    }
}

/// A training partition after oversampling: the original rows first,
/// verbatim, then the synthetic rows, all labeled with the minority class.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub x: Matrix,
    pub y: Vec<bool>,
    pub n_original: usize,
    pub minority_label: bool,
}

impl Resampled {
    pub fn n_synthetic(&self) -> usize {
        self.y.len() - self.n_original
    }
}

/// Oversamples the minority class of a training partition.
///
/// Neighbors and interpolation use standardized features; synthetic rows
/// are mapped back to raw units. SMOTE brings the minority count to exactly
/// `round(target_ratio * |majority|)`. ADASYN requests
/// `(round(target_ratio * |majority|) - |minority|) * beta` points and hits
/// that total up to per-row rounding.
pub fn apply_plan(x: &Matrix, y: &[bool], plan: &ResamplePlan) -> Result<Resampled> {
    plan.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} rows for {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    let positives = y.iter().filter(|&&b| b).count();
    let negatives = y.len() - positives;
    // Ties leave the positive class as the one to grow, which is then a no-op.
    let minority_label = positives <= negatives;
    let (n_min, n_maj) = if minority_label {
        (positives, negatives)
    } else {
        (negatives, positives)
    };
    let identity = Resampled {
        x: x.clone(),
        y: y.to_vec(),
        n_original: y.len(),
        minority_label,
    };
    let target = (plan.target_ratio * n_maj as f64).round() as usize;
    if plan.method == SamplerKind::None || target <= n_min {
        return Ok(identity);
    }
    if n_min == 0 {
        return Err(Error::Data("training partition has no minority-class rows".into()));
    }

    let (z, scaler) = standardize(x)?;
    let min_idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == minority_label).collect();
    let maj_idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] != minority_label).collect();
    let z_min = z.select_rows(&min_idx);
    let synthetic = match plan.method {
        SamplerKind::Smote => smote(&z_min, plan.k, target - n_min, plan.seed)?,
        SamplerKind::Adasyn => {
            let total = (target - n_min) as f64 * plan.beta;
            adasyn_total(&z_min, &z.select_rows(&maj_idx), plan.k, total, plan.seed)?.synthetic
        }
        SamplerKind::None => unreachable!(),
    };
    let mut out = identity;
    out.x.append(&scaler.inverse_transform(&synthetic.rows));
    out.y.extend(std::iter::repeat(minority_label).take(synthetic.len()));
    Ok(out)
}
