//! Bundled word lists: the polarity lexicon and code keyword lists.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use crate::text::words;

const POLARITY_LEXICON: &str = include_str!("../../data/polarity_lexicon.tsv");
const KEYWORDS_JAVA: &str = include_str!("../../data/keywords_java.txt");
const KEYWORDS_JS: &str = include_str!("../../data/keywords_js.txt");

/// Words that flip the sign of the next word. `t` is the tail of a split
/// contraction such as "isn't".
const NEGATORS: &[&str] = &[
    "not", "no", "never", "t", "cannot", "without", "nor", "neither", "none", "nothing",
];

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Word-valence table used for the polarity feature.
#[derive(Debug, Clone)]
pub struct PolarityLexicon {
    valence: HashMap<String, f64>,
}

impl PolarityLexicon {
    /// Parses `word<TAB>valence` lines.
    pub fn parse(text: &str) -> Self {
        let valence = data_lines(text)
            .filter_map(|line| {
                let (word, value) = line.split_once('\t')?;
                let value: f64 = value.trim().parse().ok()?;
                Some((word.trim().to_lowercase(), value.clamp(-1.0, 1.0)))
            })
            .collect();
        PolarityLexicon { valence }
    }

    pub fn bundled() -> &'static PolarityLexicon {
        static LEXICON: OnceLock<PolarityLexicon> = OnceLock::new();
        LEXICON.get_or_init(|| PolarityLexicon::parse(POLARITY_LEXICON))
    }

    pub fn valence(&self, word: &str) -> Option<f64> {
        self.valence.get(word).copied()
    }

    /// Mean valence of the lexicon words in `text`; a word right after a
    /// negator counts with flipped sign. 0 when nothing matches.
    pub fn polarity(&self, text: &str) -> f64 {
        let tokens = words(text);
        let mut sum = 0.0;
        let mut matched = 0usize;
        for (i, word) in tokens.iter().enumerate() {
            let Some(v) = self.valence(word) else {
                continue;
            };
            let negated = i > 0 && NEGATORS.contains(&tokens[i - 1].as_str());
            sum += if negated { -v } else { v };
            matched += 1;
        }
        if matched == 0 {
            0.0
        } else {
            (sum / matched as f64).clamp(-1.0, 1.0)
        }
    }
}

pub fn text_polarity(text: &str) -> f64 {
    PolarityLexicon::bundled().polarity(text)
}

/// Reserved words excluded from identifier counts.
#[derive(Debug, Clone)]
pub struct Keywords {
    words: HashSet<String>,
}

impl Keywords {
    pub fn parse(text: &str) -> Self {
        Keywords {
            words: data_lines(text).map(str::to_string).collect(),
        }
    }

    /// Union of the bundled Java and JavaScript lists.
    pub fn bundled() -> &'static Keywords {
        static KEYWORDS: OnceLock<Keywords> = OnceLock::new();
        KEYWORDS.get_or_init(|| {
            let mut kw = Keywords::parse(KEYWORDS_JAVA);
            kw.words.extend(Keywords::parse(KEYWORDS_JS).words);
            kw
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }
}
