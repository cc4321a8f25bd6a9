use super::TokenSequence;
use crate::{Error, Result};

/// Recall weight of the ROUGE-L F-measure.
pub const ROUGE_BETA: f64 = 1.2;

/// Length of the longest common subsequence, two-row DP.
pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn f_measure(hyp: &TokenSequence, reference: &TokenSequence) -> f64 {
    let lcs = lcs_len(hyp.tokens(), reference.tokens());
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / hyp.len() as f64;
    let r = lcs as f64 / reference.len() as f64;
    let b2 = ROUGE_BETA * ROUGE_BETA;
    ((1.0 + b2) * p * r) / (r + b2 * p)
}

/// ROUGE-L: the best LCS F-measure over the references.
pub fn rouge_l(hyp: &TokenSequence, refs: &[TokenSequence]) -> Result<f64> {
    if refs.is_empty() {
        return Err(Error::NoReferences);
    }
    Ok(refs.iter().map(|r| f_measure(hyp, r)).fold(0.0, f64::max))
}
