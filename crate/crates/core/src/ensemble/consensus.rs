use serde::Serialize;

use crate::metrics::{cider_d, tokenize, CorpusIdf, TokenSequence};
use crate::{Error, Result};

/// Candidate captions for one video, in model order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateSet {
    pub video_id: String,
    pub candidates: Vec<String>,
}

impl CandidateSet {
    pub fn new(video_id: impl Into<String>, candidates: Vec<String>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::EmptyCandidateSet);
        }
        Ok(Self {
            video_id: video_id.into(),
            candidates,
        })
    }

    fn tokenized(&self) -> Vec<TokenSequence> {
        self.candidates.iter().map(|c| tokenize(c)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsensusResult {
    pub winner_index: usize,
    pub winner: String,
    pub scores: Vec<f64>,
}

/// Scores candidate `i` by CIDEr-D against every other position and picks
/// the highest, lowest index on ties.
///
/// Only position `i` is left out, so a caption repeated elsewhere in the
/// set counts as its own reference. A single candidate wins with score 0.
pub fn sentence_consensus(set: &CandidateSet, idf: &CorpusIdf) -> Result<ConsensusResult> {
    if set.candidates.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    let tokens = set.tokenized();
    let scores = if tokens.len() == 1 {
        vec![0.0]
    } else {
        (0..tokens.len())
            .map(|i| {
                let others: Vec<TokenSequence> = tokens
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, t)| t.clone())
                    .collect();
                cider_d(&tokens[i], &others, idf)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let mut winner_index = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[winner_index] {
            winner_index = i;
        }
    }
    Ok(ConsensusResult {
        winner_index,
        winner: set.candidates[winner_index].clone(),
        scores,
    })
}

/// IDF over the candidate pool: each video's candidates form one document.
pub fn build_pool_idf(all_sets: &[CandidateSet]) -> Result<CorpusIdf> {
    if all_sets.is_empty() {
        return Err(Error::EmptyPool);
    }
    let docs: Vec<Vec<TokenSequence>> = all_sets.iter().map(CandidateSet::tokenized).collect();
    CorpusIdf::from_documents(docs.iter().map(Vec::as_slice))
}
