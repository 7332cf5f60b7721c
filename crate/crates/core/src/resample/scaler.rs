use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Per-column z-score with population standard deviation. Constant columns
/// map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Scaler {
    pub fn fit(x: &Matrix) -> Result<Scaler> {
        if x.n_rows() < 2 {
            return Err(Error::InvalidInput(format!(
                "standardization needs at least 2 rows, got {}",
                x.n_rows()
            )));
        }
        let n = x.n_rows() as f64;
        let (mut mean, mut sd) = (Vec::new(), Vec::new());
        for j in 0..x.n_cols() {
            let col = x.column(j);
            let m = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            mean.push(m);
            sd.push(var.sqrt());
        }
        Ok(Scaler { mean, sd })
    }

    pub fn transform(&self, x: &Matrix) -> Matrix {
        let mut z = x.clone();
        for i in 0..z.n_rows() {
            for (j, v) in z.row_mut(i).iter_mut().enumerate() {
                *v = if self.sd[j] > 0.0 {
                    (*v - self.mean[j]) / self.sd[j]
                } else {
                    0.0
                };
            }
        }
        z
    }

    /// Maps standardized rows back to raw units; constant columns return
    /// their training value.
    pub fn inverse_transform(&self, z: &Matrix) -> Matrix {
        let mut x = z.clone();
        for i in 0..x.n_rows() {
            for (j, v) in x.row_mut(i).iter_mut().enumerate() {
                *v = *v * self.sd[j] + self.mean[j];
            }
        }
        x
    }
}

/// Fits a scaler on `x` and returns the standardized matrix with it.
pub fn standardize(x: &Matrix) -> Result<(Matrix, Scaler)> {
    let scaler = Scaler::fit(x)?;
    Ok((scaler.transform(x), scaler))
}
