use super::ngram::{order_counts, NGramProfile, MAX_ORDER};
use super::{CorpusIdf, TokenSequence};
use crate::{Error, Result};

/// Width of the Gaussian length penalty.
pub const CIDER_SIGMA: f64 = 6.0;
/// Final scaling, so a perfect match scores 10.
pub const CIDER_SCALE: f64 = 10.0;

/// TF-IDF weighted n-grams of one order, with the vector norm.
struct TfIdf {
    counts: NGramProfile,
    weights: Vec<f64>,
    norm: f64,
}

impl TfIdf {
    fn new(tokens: &[String], n: usize, idf: &CorpusIdf) -> Self {
        let counts = order_counts(tokens, n);
        let weights: Vec<f64> = counts.iter().map(|(g, &c)| c as f64 * idf.idf(g)).collect();
        let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        Self {
            counts,
            weights,
            norm,
        }
    }

    fn weight_of(&self, gram: &[String], idf: &CorpusIdf) -> Option<f64> {
        self.counts.get(gram).map(|&c| c as f64 * idf.idf(gram))
    }
}

/// Clipped cosine: hypothesis weights are capped at the reference weight
/// for each shared n-gram.
fn clipped_cosine(hyp: &TfIdf, reference: &TfIdf, idf: &CorpusIdf) -> f64 {
    if hyp.norm == 0.0 || reference.norm == 0.0 {
        return 0.0;
    }
    let dot: f64 = hyp
        .counts
        .keys()
        .zip(&hyp.weights)
        .filter_map(|(g, &h)| reference.weight_of(g, idf).map(|r| h.min(r) * r))
        .sum();
    dot / (hyp.norm * reference.norm)
}

/// CIDEr-D of one hypothesis against its references.
///
/// For each order n, the clipped TF-IDF cosine against every reference is
/// damped by `exp(-(len_h - len_r)^2 / (2 sigma^2))`; the result is averaged
/// over references and orders and scaled by 10.
pub fn cider_d(hyp: &TokenSequence, refs: &[TokenSequence], idf: &CorpusIdf) -> Result<f64> {
    if refs.is_empty() {
        return Err(Error::NoReferences);
    }
    let mut total = 0.0;
    for n in 1..=MAX_ORDER {
        let h = TfIdf::new(hyp.tokens(), n, idf);
        let mut order_sum = 0.0;
        for r in refs {
            let rv = TfIdf::new(r.tokens(), n, idf);
            let delta = hyp.len() as f64 - r.len() as f64;
            let penalty = (-(delta * delta) / (2.0 * CIDER_SIGMA * CIDER_SIGMA)).exp();
            order_sum += clipped_cosine(&h, &rv, idf) * penalty;
        }
        total += order_sum / refs.len() as f64;
    }
    Ok(CIDER_SCALE * total / MAX_ORDER as f64)
}
