//! Classifiers, the train/test split and hyperparameter search.

mod forest;
mod importance;
mod mlp;
mod search;
mod split;
mod tree;

pub use forest::{fit_forest, is_positive, normalize, ForestModel, RfParams, FOREST_SCHEMA};
pub use importance::permutation_importance;
pub use mlp::{fit_mlp, fit_mlp_unchecked, Layer, MlpConfig, MlpModel, MLP_SCHEMA};
pub use search::{accuracy, random_search, Evaluation, SearchResult, SearchSpace};
pub use split::{complement, split_train_test, stratified_folds, Partition, SplitSpec};
pub use tree::{fit_tree, gini, DecisionTree, MaxFeatures, Node, TreeParams};
