use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree, DecisionTree, MaxFeatures, TreeParams};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed;

pub const FOREST_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfParams {
    pub n_estimators: usize,
    pub max_features: MaxFeatures,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for RfParams {
    fn default() -> Self {
        RfParams {
            n_estimators: 100,
            max_features: MaxFeatures::Sqrt,
            max_depth: 60,
            min_samples_split: 2,
            min_samples_leaf: 1,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl RfParams {
    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_features: self.max_features,
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            min_samples_leaf: self.min_samples_leaf,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_estimators < 1 {
            return Err(Error::Config("n_estimators must be at least 1".into()));
        }
        self.tree_params().validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub schema: u32,
    pub params: RfParams,
    pub n_features: usize,
    /// Out-of-bag misclassification rate; `None` without bootstrap or when
    /// no row was ever out of bag.
    pub oob_error: Option<f64>,
    /// Mean impurity decrease per feature, summing to 1.
    pub importances: Vec<f64>,
    pub trees: Vec<DecisionTree>,
}

/// Positive-class decision rule shared by every model.
pub fn is_positive(p: f64) -> bool {
    p >= 0.5
}

fn bootstrap_rows(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    let mut rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    rows.sort_unstable();
    rows
}

/// Normalizes nonnegative weights to sum to 1; all-zero weights become uniform.
pub fn normalize(weights: &[f64]) -> Vec<f64> {
    let sum: f64 = weights.iter().sum();
    if sum > 0.0 {
        weights.iter().map(|w| w / sum).collect()
    } else {
        vec![1.0 / weights.len() as f64; weights.len()]
    }
}

/// Fits `n_estimators` trees. Tree `t` draws its bootstrap sample and
/// feature subsets from `derive_index(seed, t)`, so the model does not
/// depend on how trees are scheduled across threads.
pub fn fit_forest(x: &Matrix, y: &[bool], params: &RfParams) -> Result<ForestModel> {
    params.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::InvalidInput(format!("{} rows for {} labels", x.n_rows(), y.len())));
    }
    let positives = y.iter().filter(|&&b| b).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::InvalidInput("forest training needs both classes".into()));
    }
    let n = x.n_rows();
    let tree_params = params.tree_params();
    let fitted: Vec<(DecisionTree, Vec<usize>)> = (0..params.n_estimators)
        .into_par_iter()
        .map(|t| {
            let tree_seed = seed::derive_index(params.seed, t as u64);
            let rows = if params.bootstrap {
                bootstrap_rows(n, seed::derive(tree_seed, "bootstrap"))
            } else {
                (0..n).collect()
            };
            let tree = fit_tree(x, y, &rows, &tree_params, tree_seed)?;
            Ok((tree, rows))
        })
        .collect::<Result<_>>()?;

    let oob_error = if params.bootstrap {
        let mut sum = vec![0.0; n];
        let mut votes = vec![0u32; n];
        let mut in_bag = vec![false; n];
        for (tree, rows) in &fitted {
            in_bag.iter_mut().for_each(|b| *b = false);
            for &r in rows {
                in_bag[r] = true;
            }
            for i in (0..n).filter(|&i| !in_bag[i]) {
                sum[i] += tree.predict_proba(x.row(i));
                votes[i] += 1;
            }
        }
        let scored: Vec<usize> = (0..n).filter(|&i| votes[i] > 0).collect();
        (!scored.is_empty()).then(|| {
            let wrong = scored
                .iter()
                .filter(|&&i| is_positive(sum[i] / votes[i] as f64) != y[i])
                .count();
            wrong as f64 / scored.len() as f64
        })
    } else {
        None
    };

    let mut total = vec![0.0; x.n_cols()];
    for (tree, _) in &fitted {
        let raw = tree.raw_importances();
        if raw.iter().sum::<f64>() > 0.0 {
            for (t, v) in total.iter_mut().zip(normalize(&raw)) {
                *t += v;
            }
        }
    }
    Ok(ForestModel {
        schema: FOREST_SCHEMA,
        params: *params,
        n_features: x.n_cols(),
        oob_error,
        importances: normalize(&total),
        trees: fitted.into_iter().map(|(t, _)| t).collect(),
    })
}

impl ForestModel {
    /// Mean of the trees' leaf probabilities for the positive class.
    pub fn predict_proba_row(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::InvalidInput(format!(
                "forest expects {} features, got {}",
                self.n_features,
                row.len()
            )));
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict_proba(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        (0..x.n_rows())
            .into_par_iter()
            .map(|i| self.predict_proba_row(x.row(i)))
            .collect()
    }

    pub fn check(&self) -> Result<()> {
        if self.schema != FOREST_SCHEMA {
            return Err(Error::SchemaVersion {
                what: "random forest model".into(),
                found: self.schema.into(),
                expected: FOREST_SCHEMA.into(),
            });
        }
        if self.trees.len() != self.params.n_estimators {
            return Err(Error::Data(format!(
                "forest has {} trees, expected {}",
                self.trees.len(),
                self.params.n_estimators
            )));
        }
        for tree in &self.trees {
            tree.check()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::tree::Node;

    fn leaf_tree(p: f64) -> DecisionTree {
        DecisionTree {
            n_features: 1,
            nodes: vec![Node::Leaf { p, n: 1 }],
        }
    }

    fn forest_of(trees: Vec<DecisionTree>) -> ForestModel {
        ForestModel {
            schema: FOREST_SCHEMA,
            params: RfParams {
                n_estimators: trees.len(),
                ..RfParams::default()
            },
            n_features: 1,
            oob_error: None,
            importances: vec![1.0],
            trees,
        }
    }

    #[test]
    fn probability_is_the_mean_of_leaves() {
        let f = forest_of(vec![leaf_tree(0.2), leaf_tree(0.6)]);
        assert!((f.predict_proba_row(&[0.0]).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(forest_of(vec![leaf_tree(0.7)]).predict_proba_row(&[3.0]).unwrap(), 0.7);
        assert_eq!(forest_of(vec![leaf_tree(1.0); 3]).predict_proba_row(&[3.0]).unwrap(), 1.0);
        assert!(f.predict_proba_row(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn single_class_is_rejected() {
        let x = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert!(fit_forest(&x, &[true, true], &RfParams::default()).is_err());
    }

    #[test]
    fn importances_normalize() {
        assert_eq!(normalize(&[0.0, 0.0]), vec![0.5, 0.5]);
        assert_eq!(normalize(&[1.0, 3.0]), vec![0.25, 0.75]);
    }
}
