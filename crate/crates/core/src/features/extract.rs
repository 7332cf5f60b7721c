use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::counts::{code_identifiers, count_features, time_features};
use super::lexicon::{Keywords, PolarityLexicon};
use super::matrix::{FeatureMatrix, FeatureName, FeatureVector, Label, N_FEATURES};
use super::tfidf::{cosine_similarity, count_cosine, fit_tfidf, TfIdfModel};
use crate::error::{Error, Result};
use crate::ingest::{AnswerEntry, PostRow, QARecord};
use crate::text::{split_code_blocks, AnswerParts, Preprocessor, TokenStream};

/// Text resources shared by every extraction.
#[derive(Debug, Clone)]
pub struct Extractor {
    pub preprocessor: Preprocessor,
    pub lexicon: PolarityLexicon,
    pub keywords: Keywords,
}

impl Default for Extractor {
    fn default() -> Self {
        Extractor {
            preprocessor: Preprocessor::default(),
            lexicon: PolarityLexicon::bundled().clone(),
            keywords: Keywords::bundled().clone(),
        }
    }
}

/// Identifies the answer behind a matrix row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RowKey {
    pub question_id: i64,
    pub answer_id: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionReport {
    /// Questions dropped because an answer predates the question.
    pub dropped_questions: Vec<i64>,
    /// Answers written before the answerer's account existed (kept).
    pub signup_after_answer: u64,
    /// Answers whose body left a `<code>` element open.
    pub unclosed_code: u64,
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub matrix: FeatureMatrix,
    pub keys: Vec<RowKey>,
    pub tfidf: TfIdfModel,
    pub report: ExtractionReport,
}

/// Token views of one question/answer pair.
pub struct PairTokens {
    pub question: TokenStream,
    pub answer_text: TokenStream,
    pub answer_code: TokenStream,
}

impl PairTokens {
    /// The tf-idf document for the pair: question prose, answer prose and
    /// answer code identifiers.
    pub fn document(&self) -> TokenStream {
        let tokens = self
            .question
            .iter()
            .chain(self.answer_text.iter())
            .chain(self.answer_code.iter())
            .map(str::to_string)
            .collect();
        TokenStream::new(tokens)
    }
}

/// Answer-side features that need neither corpus statistics nor metadata.
pub struct ContentFeatures {
    pub parts: AnswerParts,
    pub tokens: PairTokens,
}

impl Extractor {
    /// Lowercased, unstemmed code identifiers.
    pub fn code_tokens(&self, parts: &AnswerParts) -> TokenStream {
        TokenStream::new(
            parts
                .code_blocks
                .iter()
                .flat_map(|b| code_identifiers(b, &self.keywords))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn question_tokens(&self, question_body: &str) -> TokenStream {
        self.preprocessor
            .tokenize(&split_code_blocks(question_body).prose_text)
    }

    pub fn content(&self, question: &TokenStream, answer_body: &str) -> ContentFeatures {
        let parts = split_code_blocks(answer_body);
        let tokens = PairTokens {
            question: question.clone(),
            answer_text: self.preprocessor.tokenize(&parts.prose_text),
            answer_code: self.code_tokens(&parts),
        };
        ContentFeatures { parts, tokens }
    }

    /// Fills every body-derived feature of `out`.
    pub fn fill_content(&self, content: &ContentFeatures, model: &TfIdfModel, out: &mut FeatureVector) {
        let counts = count_features(&content.parts, &self.preprocessor, &self.keywords);
        let q = model.tfidf_vector(&content.tokens.question);
        let text = model.tfidf_vector(&content.tokens.answer_text);
        let code = model.tfidf_vector(&content.tokens.answer_code);
        out.set(FeatureName::UrlCount, counts.url_count as f64);
        out.set(FeatureName::NumberOfCodeLine, counts.code_lines as f64);
        out.set(FeatureName::NumberOfSentence, counts.number_of_sentences as f64);
        out.set(FeatureName::Codelength, counts.code_length as f64);
        out.set(FeatureName::NumberOfWords, counts.number_of_words as f64);
        out.set(FeatureName::TextPolarity, self.lexicon.polarity(&content.parts.prose_text));
        out.set(
            FeatureName::TextualSimilarity,
            count_cosine(&content.tokens.question, &content.tokens.answer_text).max(0.0),
        );
        out.set(FeatureName::TfAnswerText, cosine_similarity(&q, &text).max(0.0));
        out.set(FeatureName::TfAnswerCode, cosine_similarity(&q, &code).max(0.0));
    }

    /// Builds the feature matrix of a run.
    ///
    /// The tf-idf model is fitted once over every question/answer pair and
    /// then applied to each pair. Rows are ordered by (question id, answer id).
    /// A question with an answer that predates it is dropped whole.
    pub fn extract_matrix(&self, records: &[QARecord]) -> Result<Extraction> {
        let mut report = ExtractionReport::default();
        let mut kept: Vec<&QARecord> = Vec::with_capacity(records.len());
        for record in records {
            let clock_ok = record
                .answers
                .iter()
                .all(|a| time_features(&record.question, &a.post, &a.user).is_ok());
            if clock_ok {
                kept.push(record);
            } else {
                report.dropped_questions.push(record.question.id);
            }
        }
        kept.sort_by_key(|r| r.question.id);

        let prepared: Vec<(Vec<&AnswerEntry>, Vec<ContentFeatures>)> = kept
            .par_iter()
            .map(|record| {
                let question = self.question_tokens(&record.question.body);
                let mut answers: Vec<&AnswerEntry> = record.answers.iter().collect();
                answers.sort_by_key(|a| a.post.id);
                let content = answers
                    .iter()
                    .map(|a| self.content(&question, &a.post.body))
                    .collect();
                (answers, content)
            })
            .collect();

        let documents: Vec<TokenStream> = prepared
            .iter()
            .flat_map(|(_, content)| content.iter().map(|c| c.tokens.document()))
            .collect();
        if documents.is_empty() {
            return Ok(Extraction {
                matrix: FeatureMatrix::default(),
                keys: Vec::new(),
                tfidf: empty_model(),
                report,
            });
        }
        let tfidf = fit_tfidf(&documents)?;

        let rows: Vec<Vec<(RowKey, FeatureVector)>> = kept
            .par_iter()
            .zip(prepared.par_iter())
            .map(|(record, (answers, content))| {
                answers
                    .iter()
                    .zip(content)
                    .map(|(answer, content)| {
                        let row = self.answer_row(record, answer, content, &tfidf)?;
                        let key = RowKey {
                            question_id: record.question.id,
                            answer_id: answer.post.id,
                        };
                        Ok((key, row))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let mut matrix = FeatureMatrix::default();
        let mut keys = Vec::new();
        for (key, row) in rows.into_iter().flatten() {
            if row.get(FeatureName::SignUpDateTimeLag) < 0.0 {
                report.signup_after_answer += 1;
            }
            keys.push(key);
            matrix.rows.push(row);
        }
        report.unclosed_code = prepared
            .iter()
            .flat_map(|(_, c)| c)
            .filter(|c| c.parts.unclosed_code)
            .count() as u64;
        Ok(Extraction {
            matrix,
            keys,
            tfidf,
            report,
        })
    }

    fn answer_row(
        &self,
        record: &QARecord,
        answer: &AnswerEntry,
        content: &ContentFeatures,
        tfidf: &TfIdfModel,
    ) -> Result<FeatureVector> {
        let mut row = FeatureVector {
            values: [0.0; N_FEATURES],
            label: Label::from_accepted(answer.accepted),
        };
        self.fill_content(content, tfidf, &mut row);
        let times = time_features(&record.question, &answer.post, &answer.user)?;
        row.set(FeatureName::Timelag, times.timelag_ms as f64);
        row.set(FeatureName::SignUpDateTimeLag, times.signup_lag_ms as f64);
        row.set(FeatureName::Reputation, answer.user.reputation as f64);
        row.set(FeatureName::CommentCount, answer.post.comment_count as f64);
        row.set(FeatureName::Score, answer.post.score as f64);
        row.set(FeatureName::ViewCount, question_views(&record.question));
        row.set(FeatureName::AnswerCount, answer_count(record) as f64);
        Ok(row)
    }
}

/// Views are recorded per question in the dumps; every answer row carries
/// its question's count.
fn question_views(question: &PostRow) -> f64 {
    question.view_count.unwrap_or(0) as f64
}

/// The question's own AnswerCount attribute, never below the number of
/// answers that survived sampling.
fn answer_count(record: &QARecord) -> u64 {
    record
        .question
        .answer_count
        .unwrap_or(0)
        .max(record.answers.len() as u64)
}

fn empty_model() -> TfIdfModel {
    // One empty document: no vocabulary, N = 1.
    fit_tfidf(&[TokenStream::default()]).expect("non-empty corpus")
}

pub fn extract_matrix(records: &[QARecord]) -> Result<Extraction> {
    Extractor::default().extract_matrix(records)
}

impl Extraction {
    pub fn check(&self) -> Result<()> {
        for row in &self.matrix.rows {
            for name in [
                FeatureName::TextualSimilarity,
                FeatureName::TfAnswerCode,
                FeatureName::TfAnswerText,
            ] {
                let v = row.get(name);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Data(format!("{name} = {v} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }
}
