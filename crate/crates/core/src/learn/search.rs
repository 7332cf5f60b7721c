use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forest::{fit_forest, is_positive, RfParams};
use super::split::{complement, stratified_folds};
use super::tree::MaxFeatures;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::resample::{apply_plan, ResamplePlan};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub n_estimators: Vec<usize>,
    pub max_depth: Vec<usize>,
    pub max_features: Vec<MaxFeatures>,
    pub min_samples_split: Vec<usize>,
    pub min_samples_leaf: Vec<usize>,
    pub bootstrap: Vec<bool>,
    pub n_iterations: usize,
    pub cv_folds: usize,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            n_estimators: (1..=12).map(|i| i * 100).collect(),
            // Ten evenly spaced depths from 10 to 110, rounded.
            max_depth: (0..10).map(|i| (10.0 + i as f64 * 100.0 / 9.0).round() as usize).collect(),
            max_features: vec![MaxFeatures::Sqrt],
            min_samples_split: vec![2, 3, 5, 8, 10],
            min_samples_leaf: vec![1, 2, 3, 4],
            bootstrap: vec![true],
            n_iterations: 100,
            cv_folds: 4,
        }
    }
}

impl SearchSpace {
    /// Number of distinct candidate configurations.
    pub fn size(&self) -> usize {
        self.n_estimators.len()
            * self.max_depth.len()
            * self.max_features.len()
            * self.min_samples_split.len()
            * self.min_samples_leaf.len()
            * self.bootstrap.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.size() == 0 {
            return Err(Error::Config("every search candidate list must be non-empty".into()));
        }
        if self.n_iterations == 0 {
            return Err(Error::Config("search.n_iterations must be at least 1".into()));
        }
        if self.cv_folds < 2 {
            return Err(Error::Config("search.cv_folds must be at least 2".into()));
        }
        for i in 0..self.size() {
            self.candidate(i, 0).validate()?;
        }
        Ok(())
    }

    /// Decodes a mixed-radix index into a configuration.
    pub fn candidate(&self, mut index: usize, seed: u64) -> RfParams {
        let mut take = |len: usize| {
            let i = index % len;
            index /= len;
            i
        };
        let n_estimators = self.n_estimators[take(self.n_estimators.len())];
        let max_depth = self.max_depth[take(self.max_depth.len())];
        let max_features = self.max_features[take(self.max_features.len())];
        let min_samples_split = self.min_samples_split[take(self.min_samples_split.len())];
        let min_samples_leaf = self.min_samples_leaf[take(self.min_samples_leaf.len())];
        let bootstrap = self.bootstrap[take(self.bootstrap.len())];
        RfParams {
            n_estimators,
            max_features,
            max_depth,
            min_samples_split,
            min_samples_leaf,
            bootstrap,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub params: RfParams,
    pub fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: RfParams,
    pub best_accuracy: f64,
    pub evaluations: Vec<Evaluation>,
}

pub fn accuracy(p: &[f64], y: &[bool]) -> f64 {
    let correct = p.iter().zip(y).filter(|(&p, &y)| is_positive(p) == y).count();
    correct as f64 / y.len() as f64
}

/// Random search over `space` scored by stratified k-fold mean accuracy.
///
/// Up to `n_iterations` distinct configurations are drawn without
/// replacement (all of them when the space is smaller). Each training fold
/// is resampled with `plan` before fitting. The best mean accuracy wins;
/// ties prefer fewer trees, then smaller depth, then earlier draws. The
/// returned configuration carries `seed` as its forest seed.
pub fn random_search(
    x: &Matrix,
    y: &[bool],
    space: &SearchSpace,
    plan: &ResamplePlan,
    seed: u64,
) -> Result<SearchResult> {
    space.validate()?;
    let total = space.size();
    let draws: Vec<usize> = if total <= space.n_iterations {
        (0..total).collect()
    } else {
        sample(&mut seed::rng(seed::derive(seed, "draws")), total, space.n_iterations).into_vec()
    };

    let folds = stratified_folds(y, space.cv_folds, seed::derive(seed, "folds"))?;
    let prepared: Vec<_> = folds
        .iter()
        .enumerate()
        .map(|(f, held)| {
            let train = complement(y.len(), held);
            let y_train: Vec<bool> = train.iter().map(|&i| y[i]).collect();
            let fold_plan = plan.with_seed(seed::derive_index(seed::derive(seed, "resample"), f as u64));
            let resampled = apply_plan(&x.select_rows(&train), &y_train, &fold_plan)?;
            let y_held: Vec<bool> = held.iter().map(|&i| y[i]).collect();
            Ok((resampled, x.select_rows(held), y_held))
        })
        .collect::<Result<_>>()?;

    let forest_seed = seed::derive(seed, "forest");
    let jobs: Vec<(usize, usize)> = (0..draws.len())
        .flat_map(|c| (0..folds.len()).map(move |f| (c, f)))
        .collect();
    let scores: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, f)| {
            let params = space.candidate(draws[c], seed::derive_index(forest_seed, f as u64));
            let (train, x_held, y_held) = &prepared[f];
            let model = fit_forest(&train.x, &train.y, &params)?;
            Ok(accuracy(&model.predict_proba(x_held)?, y_held))
        })
        .collect::<Result<_>>()?;

    let evaluations: Vec<Evaluation> = draws
        .iter()
        .enumerate()
        .map(|(c, &d)| {
            let fold_accuracy = scores[c * folds.len()..(c + 1) * folds.len()].to_vec();
            let mean_accuracy = fold_accuracy.iter().sum::<f64>() / fold_accuracy.len() as f64;
            Evaluation {
                params: space.candidate(d, seed),
                fold_accuracy,
                mean_accuracy,
            }
        })
        .collect();
    let best = evaluations
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            b.mean_accuracy
                .total_cmp(&a.mean_accuracy)
                .then(a.params.n_estimators.cmp(&b.params.n_estimators))
                .then(a.params.max_depth.cmp(&b.params.max_depth))
                .then(i.cmp(j))
        })
        .map(|(_, e)| e.clone())
        .expect("at least one candidate");
    Ok(SearchResult {
        best: best.params,
        best_accuracy: best.mean_accuracy,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_space_matches_the_stated_grid() {
        let s = SearchSpace::default();
        assert_eq!(s.n_estimators.first(), Some(&100));
        assert_eq!(s.n_estimators.last(), Some(&1200));
        assert_eq!(s.n_estimators.len(), 12);
        assert_eq!(s.max_depth, vec![10, 21, 32, 43, 54, 66, 77, 88, 99, 110]);
        assert!(s.min_samples_split.contains(&3) && s.min_samples_split.contains(&8));
        assert!(s.min_samples_leaf.contains(&3));
        s.validate().unwrap();
    }

    #[test]
    fn candidate_decoding_covers_the_space() {
        let s = SearchSpace {
            n_estimators: vec![1, 2],
            max_depth: vec![3, 4, 5],
            ..SearchSpace::default()
        };
        let mut seen: Vec<(usize, usize, usize, usize)> = (0..s.size())
            .map(|i| {
                let p = s.candidate(i, 0);
                (p.n_estimators, p.max_depth, p.min_samples_split, p.min_samples_leaf)
            })
            .collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), s.size());
    }
}
