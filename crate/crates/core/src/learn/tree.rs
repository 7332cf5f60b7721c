use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed;

/// Gini impurity `1 - sum p_c^2` of class counts.
pub fn gini(counts: &[f64]) -> Result<f64> {
    let total: f64 = counts.iter().sum();
    if counts.iter().any(|&c| c < 0.0) || total <= 0.0 {
        return Err(Error::InvalidInput(format!("invalid class counts {counts:?}")));
    }
    Ok(gini_unchecked(counts[0], counts[1]))
}

fn gini_unchecked(neg: f64, pos: f64) -> f64 {
    let n = neg + pos;
    let (a, b) = (neg / n, pos / n);
    1.0 - a * a - b * b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    /// `ceil(sqrt(d))`.
    Sqrt,
    All,
    Fixed(usize),
}

impl MaxFeatures {
    pub fn resolve(self, d: usize) -> usize {
        let m = match self {
            MaxFeatures::Sqrt => (d as f64).sqrt().ceil() as usize,
            MaxFeatures::All => d,
            MaxFeatures::Fixed(m) => m,
        };
        m.clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeParams {
    pub max_features: MaxFeatures,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::Config("min_samples_split must be at least 2".into()));
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::Config("min_samples_leaf must be at least 1".into()));
        }
        if self.max_features == MaxFeatures::Fixed(0) {
            return Err(Error::Config("max_features must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Weighted impurity decrease, as a fraction of the root sample.
        gain: f64,
    },
    Leaf {
        /// Probability of the positive class; the negative class gets the rest.
        p: f64,
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub n_features: usize,
    /// Node 0 is the root.
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn leaf_of(&self, row: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Split { feature, threshold, left, right, .. } => {
                    at = if row[feature] <= threshold { left } else { right };
                }
                Node::Leaf { .. } => return at,
            }
        }
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_of(row)] {
            Node::Leaf { p, .. } => p,
            Node::Split { .. } => unreachable!("leaf_of returns a leaf"),
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }

    /// Impurity decrease per feature, unnormalized.
    pub fn raw_importances(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features];
        for node in &self.nodes {
            if let Node::Split { feature, gain, .. } = *node {
                out[feature] += gain;
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        for node in &self.nodes {
            match *node {
                Node::Split { feature, threshold, left, right, .. } => {
                    if feature >= self.n_features || !threshold.is_finite() {
                        return Err(Error::Data("malformed split node".into()));
                    }
                    if left >= self.nodes.len() || right >= self.nodes.len() {
                        return Err(Error::Data("split child out of range".into()));
                    }
                }
                Node::Leaf { p, .. } => {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::Data(format!("leaf probability {p}")));
                    }
                }
            }
        }
        Ok(())
    }
}

struct Best {
    feature: usize,
    threshold: f64,
    impurity: f64,
    n_left: usize,
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [bool],
    params: &'a TreeParams,
    n_root: f64,
    k_features: usize,
    rng: seed::Rng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn counts(&self, rows: &[usize]) -> (f64, f64) {
        let pos = rows.iter().filter(|&&r| self.y[r]).count() as f64;
        (rows.len() as f64 - pos, pos)
    }

    fn leaf(&mut self, rows: &[usize]) -> usize {
        let (_, pos) = self.counts(rows);
        self.nodes.push(Node::Leaf {
            p: pos / rows.len() as f64,
            n: rows.len(),
        });
        self.nodes.len() - 1
    }

    fn best_split(&mut self, rows: &mut [usize], parent: f64) -> Option<Best> {
        let d = self.x.n_cols();
        let mut features = sample(&mut self.rng, d, self.k_features).into_vec();
        features.sort_unstable();
        let n = rows.len();
        let (total_neg, total_pos) = self.counts(rows);
        let min_leaf = self.params.min_samples_leaf;
        let mut best: Option<Best> = None;
        for f in features {
            rows.sort_by(|&a, &b| self.x.get(a, f).total_cmp(&self.x.get(b, f)).then(a.cmp(&b)));
            let (mut neg, mut pos) = (0.0, 0.0);
            for i in 0..n - 1 {
                if self.y[rows[i]] {
                    pos += 1.0;
                } else {
                    neg += 1.0;
                }
                let (lo, hi) = (self.x.get(rows[i], f), self.x.get(rows[i + 1], f));
                let n_left = i + 1;
                if lo == hi || n_left < min_leaf || n - n_left < min_leaf {
                    continue;
                }
                let (nl, nr) = (n_left as f64, (n - n_left) as f64);
                let impurity = (nl * gini_unchecked(neg, pos)
                    + nr * gini_unchecked(total_neg - neg, total_pos - pos))
                    / n as f64;
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi || !threshold.is_finite() {
                    threshold = lo;
                }
                // Strict improvement keeps the lowest feature, then the lowest threshold.
                if best.as_ref().map_or(true, |b| impurity < b.impurity) {
                    best = Some(Best { feature: f, threshold, impurity, n_left });
                }
            }
        }
        best.filter(|b| b.impurity <= parent)
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let (neg, pos) = self.counts(rows);
        let n = rows.len();
        if depth >= self.params.max_depth
            || n < self.params.min_samples_split
            || n < 2 * self.params.min_samples_leaf
            || neg == 0.0
            || pos == 0.0
        {
            return self.leaf(rows);
        }
        let parent = gini_unchecked(neg, pos);
        let Some(best) = self.best_split(rows, parent) else {
            return self.leaf(rows);
        };
        let f = best.feature;
        rows.sort_by(|&a, &b| self.x.get(a, f).total_cmp(&self.x.get(b, f)).then(a.cmp(&b)));
        let gain = n as f64 / self.n_root * (parent - best.impurity);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { p: 0.0, n: 0 });
        let (left_rows, right_rows) = rows.split_at_mut(best.n_left);
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[at] = Node::Split {
            feature: f,
            threshold: best.threshold,
            left,
            right,
            gain,
        };
        at
    }
}

/// Grows a classification tree on the rows listed in `rows` (repeats act
/// as sample weights).
///
/// Each node draws `max_features` candidate features without replacement
/// and takes the split with the lowest weighted child Gini impurity among
/// midpoints of consecutive distinct values; ties keep the lowest feature
/// index, then the lowest threshold.
pub fn fit_tree(x: &Matrix, y: &[bool], rows: &[usize], params: &TreeParams, seed: u64) -> Result<DecisionTree> {
    params.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::InvalidInput(format!("{} rows for {} labels", x.n_rows(), y.len())));
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("cannot fit a tree on zero rows".into()));
    }
    let mut rows = rows.to_vec();
    let mut builder = Builder {
        x,
        y,
        params,
        n_root: rows.len() as f64,
        k_features: params.max_features.resolve(x.n_cols()),
        rng: seed::rng(seed),
        nodes: Vec::new(),
    };
    builder.grow(&mut rows, 0);
    Ok(DecisionTree {
        n_features: x.n_cols(),
        nodes: builder.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(depth: usize) -> TreeParams {
        TreeParams {
            max_features: MaxFeatures::All,
            max_depth: depth,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }

    fn all_rows(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn gini_examples() {
        assert_eq!(gini(&[5.0, 0.0]).unwrap(), 0.0);
        assert_eq!(gini(&[4.0, 4.0]).unwrap(), 0.5);
        assert_eq!(gini(&[3.0, 1.0]).unwrap(), 0.375);
        assert!(gini(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn separable_data_gives_one_split() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0], [10.0], [11.0]]).unwrap();
        let y = [false, false, false, true, true];
        let t = fit_tree(&x, &y, &all_rows(5), &params(5), 0).unwrap();
        assert_eq!(t.depth(), 1);
        assert!(matches!(t.nodes[0], Node::Split { threshold, .. } if threshold == 6.5));
        for (row, &label) in x.rows().zip(&y) {
            assert_eq!(t.predict_proba(row) >= 0.5, label);
        }
        t.check().unwrap();
    }

    #[test]
    fn constant_features_give_majority_leaf() {
        let x = Matrix::from_rows(&[[1.0, 2.0]; 5]).unwrap();
        let y = [true, false, true, true, false];
        let t = fit_tree(&x, &y, &all_rows(5), &params(5), 0).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_proba(&[0.0, 0.0]), 0.6);
    }

    #[test]
    fn xor_is_learned_with_depth_two() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let y = [false, false, true, true];
        let t = fit_tree(&x, &y, &all_rows(4), &params(2), 0).unwrap();
        for (row, &label) in x.rows().zip(&y) {
            assert_eq!(t.predict_proba(row) >= 0.5, label);
        }
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn leaf_size_and_depth_limits() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0], [4.0], [5.0], [6.0]]).unwrap();
        let y = [false, true, false, true, false, true];
        let p = TreeParams { min_samples_leaf: 3, ..params(10) };
        let t = fit_tree(&x, &y, &all_rows(6), &p, 0).unwrap();
        for node in &t.nodes {
            if let Node::Leaf { n, .. } = node {
                assert!(*n >= 3);
            }
        }
        let stump = fit_tree(&x, &y, &all_rows(6), &params(1), 0).unwrap();
        assert!(stump.depth() <= 1);
    }

    #[test]
    fn max_features_resolution() {
        assert_eq!(MaxFeatures::Sqrt.resolve(14), 4);
        assert_eq!(MaxFeatures::Sqrt.resolve(16), 4);
        assert_eq!(MaxFeatures::Sqrt.resolve(10), 4);
        assert_eq!(MaxFeatures::All.resolve(7), 7);
        assert_eq!(MaxFeatures::Fixed(20).resolve(7), 7);
    }
}
