use std::collections::{BTreeMap, BTreeSet};

use super::ngram::{ngram_counts, NGram, MAX_ORDER};
use super::TokenSequence;
use crate::{Error, Result};

/// Document frequencies of n-grams over a corpus where each document is the
/// set of captions attached to one video.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusIdf {
    num_docs: usize,
    doc_freq: BTreeMap<NGram, usize>,
}

impl CorpusIdf {
    /// Builds statistics from `(video_id, captions)` documents.
    pub fn build<'a, I, S>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, &'a [TokenSequence])>,
        S: AsRef<str>,
    {
        Self::from_documents(docs.into_iter().map(|(_, caps)| caps))
    }

    pub fn from_documents<'a, I>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [TokenSequence]>,
    {
        let mut num_docs = 0;
        let mut doc_freq = BTreeMap::new();
        for captions in docs {
            num_docs += 1;
            let seen: BTreeSet<NGram> = captions
                .iter()
                .flat_map(|c| ngram_counts(c.tokens(), MAX_ORDER).into_keys())
                .collect();
            for g in seen {
                *doc_freq.entry(g).or_insert(0) += 1;
            }
        }
        if num_docs == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(Self { num_docs, doc_freq })
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn doc_freq(&self, gram: &[String]) -> usize {
        self.doc_freq.get(gram).copied().unwrap_or(0)
    }

    /// `ln(num_docs / df)`, or 0 for n-grams never seen in the corpus.
    pub fn idf(&self, gram: &[String]) -> f64 {
        match self.doc_freq.get(gram) {
            Some(&df) => (self.num_docs as f64 / df as f64).ln(),
            None => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NGram, usize)> {
        self.doc_freq.iter().map(|(g, &df)| (g, df))
    }
}
