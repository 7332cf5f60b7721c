use std::sync::OnceLock;

use regex::Regex;

use super::lexicon::Keywords;
use crate::error::{Error, Result};
use crate::ingest::{PostRow, UserRow};
use crate::text::{split_sentences, AnswerParts, Preprocessor};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountFeatures {
    pub number_of_words: u64,
    pub number_of_sentences: u64,
    pub url_count: u64,
    pub code_lines: u64,
    pub code_length: u64,
}

fn url_pattern() -> &'static Regex {
    static URL: OnceLock<Regex> = OnceLock::new();
    URL.get_or_init(|| Regex::new(r#"https?://[^\s<>"'()\[\]]+"#).expect("valid regex"))
}

fn identifier_pattern() -> &'static Regex {
    static IDENT: OnceLock<Regex> = OnceLock::new();
    IDENT.get_or_init(|| Regex::new(r"[A-Za-z_][A-Za-z0-9_]*").expect("valid regex"))
}

/// Identifiers in a code block, keywords removed, in source order.
pub fn code_identifiers<'a>(code: &'a str, keywords: &'a Keywords) -> impl Iterator<Item = &'a str> {
    identifier_pattern()
        .find_iter(code)
        .map(|m| m.as_str())
        .filter(|id| !keywords.contains(id))
}

pub fn count_features(parts: &AnswerParts, pre: &Preprocessor, keywords: &Keywords) -> CountFeatures {
    let code_lines = parts
        .code_blocks
        .iter()
        .flat_map(|block| block.lines())
        .filter(|line| !line.trim().is_empty())
        .count();
    let code_length = parts
        .code_blocks
        .iter()
        .map(|block| code_identifiers(block, keywords).count())
        .sum::<usize>();
    CountFeatures {
        number_of_words: pre.content_words(&parts.prose_text).len() as u64,
        number_of_sentences: split_sentences(&parts.prose_text).len() as u64,
        url_count: url_pattern().find_iter(&parts.prose_text).count() as u64,
        code_lines: code_lines as u64,
        code_length: code_length as u64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeFeatures {
    pub timelag_ms: i64,
    pub signup_lag_ms: i64,
}

impl TimeFeatures {
    /// The answerer's account is younger than the answer.
    pub fn signup_after_answer(&self) -> bool {
        self.signup_lag_ms < 0
    }
}

/// Answer delay after the question and answerer account age at answer time,
/// both in milliseconds. A negative answer delay is a data error.
pub fn time_features(question: &PostRow, answer: &PostRow, user: &UserRow) -> Result<TimeFeatures> {
    let timelag_ms = answer.creation_ts.millis() - question.creation_ts.millis();
    if timelag_ms < 0 {
        return Err(Error::Data(format!(
            "answer {} predates question {} by {} ms",
            answer.id, question.id, -timelag_ms
        )));
    }
    Ok(TimeFeatures {
        timelag_ms,
        signup_lag_ms: answer.creation_ts.millis() - user.creation_ts.millis(),
    })
}
