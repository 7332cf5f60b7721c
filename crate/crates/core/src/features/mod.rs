//! The sixteen per-answer features and the modeling matrix.

mod counts;
mod extract;
mod lexicon;
mod matrix;
mod tfidf;

pub use counts::{code_identifiers, count_features, time_features, CountFeatures, TimeFeatures};
pub use extract::{
    extract_matrix, ContentFeatures, Extraction, ExtractionReport, Extractor, PairTokens, RowKey,
};
pub use lexicon::{text_polarity, Keywords, PolarityLexicon};
pub use matrix::{format_sig9, FeatureMatrix, FeatureName, FeatureVector, Label, N_FEATURES};
pub use tfidf::{cosine_similarity, count_cosine, fit_tfidf, SparseVector, TfIdfModel};

use crate::text::tokenize;

/// Cosine of raw word-count vectors of two prose texts.
pub fn vector_concordance_similarity(question_text: &str, answer_text: &str) -> f64 {
    count_cosine(&tokenize(question_text), &tokenize(answer_text))
}
