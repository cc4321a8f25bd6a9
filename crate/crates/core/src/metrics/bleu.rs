use std::collections::BTreeMap;

use super::ngram::{order_counts, NGram, MAX_ORDER};
use super::TokenSequence;
use crate::{Error, Result};

/// Sufficient statistics for BLEU-4. Corpus BLEU pools these across
/// sentences before taking the geometric mean.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BleuStats {
    pub matches: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn from_pair(hyp: &TokenSequence, refs: &[TokenSequence]) -> Result<Self> {
        if refs.is_empty() {
            return Err(Error::NoReferences);
        }
        let mut stats = BleuStats {
            hyp_len: hyp.len(),
            ref_len: closest_ref_len(hyp.len(), refs),
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let hyp_counts = order_counts(hyp.tokens(), n);
            let mut max_ref: BTreeMap<NGram, usize> = BTreeMap::new();
            for r in refs {
                for (g, c) in order_counts(r.tokens(), n) {
                    let slot = max_ref.entry(g).or_insert(0);
                    *slot = (*slot).max(c);
                }
            }
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(max_ref.get(g).copied().unwrap_or(0)))
                .sum();
            stats.totals[n - 1] = hyp_counts.values().sum();
        }
        Ok(stats)
    }

    pub fn accumulate(&mut self, other: &BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// Geometric mean of the four precisions times the brevity penalty.
    /// Any zero precision gives 0 (no smoothing).
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        for n in 0..MAX_ORDER {
            if self.matches[n] == 0 || self.totals[n] == 0 {
                return 0.0;
            }
            log_sum += (self.matches[n] as f64 / self.totals[n] as f64).ln();
        }
        let bp = if self.hyp_len >= self.ref_len {
            1.0
        } else {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        };
        (bp * (log_sum / MAX_ORDER as f64).exp()).min(1.0)
    }
}

/// Reference length closest to `hyp_len`; ties go to the shorter reference.
fn closest_ref_len(hyp_len: usize, refs: &[TokenSequence]) -> usize {
    refs.iter()
        .map(TokenSequence::len)
        .min_by_key(|&r| (r.abs_diff(hyp_len), r))
        .unwrap_or(0)
}

/// Sentence-level BLEU-4 with clipping against the per-n-gram maximum
/// count over all references.
pub fn bleu4(hyp: &TokenSequence, refs: &[TokenSequence]) -> Result<f64> {
    Ok(BleuStats::from_pair(hyp, refs)?.score())
}
