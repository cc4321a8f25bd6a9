use std::collections::HashMap;

use crate::metrics::{tokenize, TokenSequence};
use crate::{Error, Result};

pub type TokenId = usize;

pub const PAD: TokenId = 0;
pub const BOS: TokenId = 1;
pub const EOS: TokenId = 2;
pub const UNK: TokenId = 3;

const RESERVED: [&str; 4] = ["<pad>", "<bos>", "<eos>", "<unk>"];

/// Bijection between token ids and words, with the four reserved ids first.
#[derive(Clone, Debug)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, TokenId>,
}

impl PartialEq for Vocab {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl Eq for Vocab {}

impl Vocab {
    /// Reserved tokens followed by `words` in first-seen order; duplicates
    /// are dropped.
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut tokens: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        for w in words {
            let w = w.as_ref();
            if tokenize(w).tokens() != [w] {
                return Err(Error::InvalidArgument(format!(
                    "`{w}` is not a single token"
                )));
            }
            if !tokens.iter().any(|t| t == w) {
                tokens.push(w.to_owned());
            }
        }
        Self::from_tokens(tokens)
    }

    /// Builds from a full id-ordered token list, reserved entries included.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() < 5 {
            return Err(Error::InvalidArgument(format!(
                "vocabulary needs at least 5 entries, got {}",
                tokens.len()
            )));
        }
        if tokens[..4].iter().zip(RESERVED).any(|(t, r)| t != r) {
            return Err(Error::InvalidArgument(
                "vocabulary must start with <pad> <bos> <eos> <unk>".into(),
            ));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (id, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), id).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate vocabulary entry `{t}`"
                )));
            }
        }
        Ok(Self { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, id: TokenId) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn id(&self, word: &str) -> TokenId {
        match self.index.get(word) {
            Some(&id) if id > UNK => id,
            _ => UNK,
        }
    }

    pub fn encode(&self, seq: &TokenSequence) -> Vec<TokenId> {
        seq.iter().map(|w| self.id(w)).collect()
    }

    /// Space-joined words, skipping the reserved ids.
    pub fn decode(&self, ids: &[TokenId]) -> String {
        ids.iter()
            .filter(|&&id| id > UNK)
            .filter_map(|&id| self.token(id))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Bag-of-words count vector over the vocabulary.
    pub fn bag_of_words(&self, seq: &TokenSequence) -> Vec<f64> {
        let mut bow = vec![0.0; self.len()];
        for id in self.encode(seq) {
            bow[id] += 1.0;
        }
        bow
    }
}
