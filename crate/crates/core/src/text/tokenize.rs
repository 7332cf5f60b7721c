use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use super::porter::porter_stem;
use crate::error::{Error, Result};

const STANDARD_STOP_WORDS: &str = include_str!("../../data/stopwords.txt");

/// A set of lowercase words removed before stemming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        StopList { words }
    }

    /// The bundled 179-word English list.
    pub fn standard() -> &'static StopList {
        static LIST: OnceLock<StopList> = OnceLock::new();
        LIST.get_or_init(|| StopList::parse(STANDARD_STOP_WORDS))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(StopList::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Lowercase stems in text order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenStream { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

/// Lowercased runs of letters. Digits, punctuation and whitespace all act as
/// separators, so purely numeric tokens never survive.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn remove_stop_words(tokens: &[String], stop: &StopList) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stop.contains(t))
        .cloned()
        .collect()
}

/// Text normalization: split into words, drop stop words, stem each survivor
/// once.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    stop: StopList,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Preprocessor {
            stop: StopList::standard().clone(),
        }
    }
}

impl Preprocessor {
    pub fn new(stop: StopList) -> Self {
        Preprocessor { stop }
    }

    pub fn stop_list(&self) -> &StopList {
        &self.stop
    }

    /// Words remaining after stop-word removal, before stemming.
    pub fn content_words(&self, text: &str) -> Vec<String> {
        remove_stop_words(&words(text), &self.stop)
    }

    /// A stem that lands on a stop word ("ins" -> "in") is dropped too.
    pub fn tokenize(&self, text: &str) -> TokenStream {
        TokenStream::new(
            self.content_words(text)
                .iter()
                .map(|w| porter_stem(w))
                .filter(|stem| !self.stop.contains(stem))
                .collect(),
        )
    }
}

/// [`Preprocessor::tokenize`] with the bundled stop list.
pub fn tokenize(text: &str) -> TokenStream {
    static DEFAULT: OnceLock<Preprocessor> = OnceLock::new();
    DEFAULT.get_or_init(Preprocessor::default).tokenize(text)
}

/// Rule-based sentence splitter: a sentence ends at `.`, `!` or `?` followed
/// by whitespace or the end of the text. Segments without any letter or
/// digit are dropped.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let boundary = chars.peek().is_none_or(|&(_, next)| next.is_whitespace());
        if boundary {
            let end = i + c.len_utf8();
            sentences.push(&text[start..end]);
            start = end;
        }
    }
    sentences.push(&text[start..]);
    sentences
        .into_iter()
        .map(str::trim)
        .filter(|s| s.chars().any(char::is_alphanumeric))
        .map(str::to_string)
        .collect()
}
