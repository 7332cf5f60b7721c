//! Augmented-frequency tf-idf weighting and cosine similarity.
//!
//! A term's weight in a document is `(0.5 + 0.5 * tf / max_tf) * ln(N / df)`,
//! where `max_tf` is taken over every term of the document (including terms
//! the model has never seen) and `N` counts the fitted documents.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::TokenStream;

/// Sparse vector: `(index, value)` pairs sorted by index, no duplicates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn from_pairs(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|&(i, _)| i);
        entries.dedup_by_key(|&mut (i, _)| i);
        SparseVector { entries }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut sum = 0.0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    sum += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        sum
    }
}

/// `q . a / (|q| |a|)`, or 0 when either vector has zero norm.
pub fn cosine_similarity(q: &SparseVector, a: &SparseVector) -> f64 {
    // sqrt of the product keeps identical vectors at exactly 1.
    let denom = (q.squared_norm() * a.squared_norm()).sqrt();
    if denom == 0.0 {
        return 0.0;
    }
    (q.dot(a) / denom).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    /// Vocabulary in index order (sorted lexicographically).
    terms: Vec<String>,
    /// Document frequency per term, aligned with `terms`.
    df: Vec<u64>,
    n_docs: u64,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl TfIdfModel {
    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    pub fn vocabulary_len(&self) -> usize {
        self.terms.len()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn df(&self, term: &str) -> Option<u64> {
        self.index_of(term).map(|i| self.df[i])
    }

    /// `ln(N / df)`; `None` for terms outside the vocabulary.
    pub fn idf(&self, term: &str) -> Option<f64> {
        self.index_of(term).map(|i| self.idf_at(i))
    }

    fn idf_at(&self, index: usize) -> f64 {
        (self.n_docs as f64 / self.df[index] as f64).ln()
    }

    /// Weight vector of one document. Terms unknown to the model get no
    /// weight but still count toward the document's maximum term frequency.
    pub fn tfidf_vector(&self, doc: &TokenStream) -> SparseVector {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for token in doc.iter() {
            *counts.entry(token).or_default() += 1;
        }
        let Some(&max_tf) = counts.values().max() else {
            return SparseVector::default();
        };
        let entries = counts
            .into_iter()
            .filter_map(|(term, tf)| {
                let i = self.index_of(term)?;
                let nf = 0.5 + 0.5 * tf as f64 / max_tf as f64;
                Some((i, nf * self.idf_at(i)))
            })
            .collect();
        SparseVector::from_pairs(entries)
    }

    /// Rebuilds the term index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
    }

    pub fn check_invariants(&self) -> Result<()> {
        for (term, &df) in self.terms.iter().zip(&self.df) {
            if df == 0 || df > self.n_docs {
                return Err(Error::Data(format!(
                    "term {term:?} has document frequency {df} outside 1..={}",
                    self.n_docs
                )));
            }
        }
        Ok(())
    }
}

pub fn fit_tfidf(corpus: &[TokenStream]) -> Result<TfIdfModel> {
    if corpus.is_empty() {
        return Err(Error::InvalidInput("cannot fit tf-idf on an empty corpus".into()));
    }
    let mut df: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in corpus {
        let mut seen: Vec<&str> = doc.iter().collect();
        seen.sort_unstable();
        seen.dedup();
        for term in seen {
            *df.entry(term).or_default() += 1;
        }
    }
    let mut model = TfIdfModel {
        terms: df.keys().map(|t| t.to_string()).collect(),
        df: df.values().copied().collect(),
        n_docs: corpus.len() as u64,
        index: HashMap::new(),
    };
    model.reindex();
    Ok(model)
}

/// Cosine over raw term counts of the two token lists (no idf).
pub fn count_cosine(a: &TokenStream, b: &TokenStream) -> f64 {
    let mut vocab: BTreeMap<&str, usize> = BTreeMap::new();
    for token in a.iter().chain(b.iter()) {
        let next = vocab.len();
        vocab.entry(token).or_insert(next);
    }
    let count = |doc: &TokenStream| {
        let mut dense = vec![0.0; vocab.len()];
        for token in doc.iter() {
            dense[vocab[token]] += 1.0;
        }
        SparseVector::from_dense(&dense)
    };
    cosine_similarity(&count(a), &count(b))
}
