//! Prose/code separation and prose normalization.

mod html;
mod porter;
mod tokenize;

pub use html::{split_code_blocks, AnswerParts};
pub use porter::porter_stem;
pub use tokenize::{
    remove_stop_words, split_sentences, tokenize, words, Preprocessor, StopList, TokenStream,
};
