use proptest::prelude::*;
use soaccept_core::text::{porter_stem, split_code_blocks, tokenize, StopList};

const VOCABULARY: &str = include_str!("data/porter_vocabulary.tsv");

#[test]
fn porter_matches_reference_vocabulary() {
    let mut checked = 0;
    for line in VOCABULARY.lines() {
        let (word, stem) = line.split_once('\t').unwrap();
        assert_eq!(porter_stem(word), stem, "stem of {word:?}");
        checked += 1;
    }
    assert!(checked >= 100);
}

proptest! {
    #[test]
    fn token_stream_invariants(text in "\\PC{0,80}") {
        let stop = StopList::standard();
        for token in tokenize(&text).iter() {
            prop_assert!(!token.is_empty());
            prop_assert!(token.chars().all(char::is_alphabetic), "{token:?}");
            prop_assert_eq!(token.to_lowercase(), token);
            prop_assert!(!stop.contains(token));
        }
    }

    #[test]
    fn tag_free_prose_is_preserved(text in "[^<&]{0,120}") {
        let parts = split_code_blocks(&text);
        prop_assert_eq!(parts.prose_text, text);
        prop_assert!(parts.code_blocks.is_empty());
    }

    #[test]
    fn split_output_has_no_markup(
        chunks in proptest::collection::vec(("[a-z ]{0,10}", 0u8..4), 0..8)
    ) {
        let mut body = String::new();
        for (text, kind) in &chunks {
            match kind {
                0 => body.push_str(text),
                1 => body.push_str(&format!("<p>{text}</p>")),
                2 => body.push_str(&format!("<code>{text}</code>")),
                _ => body.push_str(&format!("<pre><code>{text}</code></pre>")),
            }
        }
        let parts = split_code_blocks(&body);
        prop_assert!(!parts.prose_text.contains('<'));
        prop_assert!(parts.code_blocks.iter().all(|c| !c.contains("<code>")));
        let expected_blocks = chunks.iter().filter(|(_, k)| *k >= 2).count();
        prop_assert_eq!(parts.code_blocks.len(), expected_blocks);
    }
}
