use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Pairwise Pearson coefficients of named columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// Row-major `names.len()` square matrix.
    pub r: Vec<Vec<f64>>,
    /// Columns with zero variance; their off-diagonal coefficients are 0.
    #[serde(default)]
    pub zero_variance: Vec<String>,
}

impl CorrelationMatrix {
    /// Identity correlation over `names`.
    pub fn identity(names: &[&str]) -> Self {
        let n = names.len();
        CorrelationMatrix {
            names: names.iter().map(|s| s.to_string()).collect(),
            r: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            zero_variance: Vec::new(),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.r[self.index_of(a)?][self.index_of(b)?])
    }

    /// Sets both `r[a][b]` and `r[b][a]`.
    pub fn set(&mut self, a: &str, b: &str, value: f64) -> Result<()> {
        let (Some(i), Some(j)) = (self.index_of(a), self.index_of(b)) else {
            return Err(Error::InvalidInput(format!("unknown column in pair ({a}, {b})")));
        };
        self.r[i][j] = value;
        self.r[j][i] = value;
        Ok(())
    }
}

/// Sample Pearson correlation of every column pair of `x`.
pub fn pearson_matrix(x: &Matrix, names: &[&str]) -> Result<CorrelationMatrix> {
    if x.n_rows() < 2 {
        return Err(Error::InvalidInput(format!(
            "correlation needs at least 2 rows, got {}",
            x.n_rows()
        )));
    }
    if names.len() != x.n_cols() {
        return Err(Error::InvalidInput(format!(
            "{} names for {} columns",
            names.len(),
            x.n_cols()
        )));
    }
    let n = x.n_rows() as f64;
    let centered: Vec<Vec<f64>> = (0..x.n_cols())
        .map(|j| {
            let col = x.column(j);
            let mean = col.iter().sum::<f64>() / n;
            col.into_iter().map(|v| v - mean).collect()
        })
        .collect();
    let ss: Vec<f64> = centered.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
    let mut out = CorrelationMatrix::identity(names);
    for j in 0..x.n_cols() {
        if ss[j] == 0.0 {
            out.zero_variance.push(names[j].to_string());
        }
        for l in j + 1..x.n_cols() {
            let r = if ss[j] == 0.0 || ss[l] == 0.0 {
                0.0
            } else {
                let cross: f64 = centered[j].iter().zip(&centered[l]).map(|(a, b)| a * b).sum();
                (cross / (ss[j] * ss[l]).sqrt()).clamp(-1.0, 1.0)
            };
            out.r[j][l] = r;
            out.r[l][j] = r;
        }
    }
    Ok(out)
}
