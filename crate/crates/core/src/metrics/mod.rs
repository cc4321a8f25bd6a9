//! Captioning metrics: BLEU-4, ROUGE-L and CIDEr-D, plus the tokenizer and
//! n-gram statistics they share.

mod bleu;
mod cider;
mod corpus;
mod idf;
mod ngram;
mod rouge;
mod tokenize;

pub use bleu::{bleu4, BleuStats};
pub use cider::{cider_d, CIDER_SCALE, CIDER_SIGMA};
pub use corpus::{corpus_eval, MetricReport};
pub use idf::CorpusIdf;
pub use ngram::{ngram_counts, NGram, NGramProfile, MAX_ORDER};
pub use rouge::{lcs_len, rouge_l, ROUGE_BETA};
pub use tokenize::{tokenize, TokenSequence};
