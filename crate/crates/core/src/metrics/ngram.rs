use std::collections::BTreeMap;

/// Longest n-gram order used by every metric.
pub const MAX_ORDER: usize = 4;

pub type NGram = Vec<String>;

/// Multiset of contiguous n-grams. Ordered so that floating-point reductions
/// over it are reproducible.
pub type NGramProfile = BTreeMap<NGram, usize>;

/// Counts every contiguous n-gram of order `1..=n_max`.
///
/// `n_max` is clamped to `1..=MAX_ORDER`.
pub fn ngram_counts(tokens: &[String], n_max: usize) -> NGramProfile {
    let n_max = n_max.clamp(1, MAX_ORDER);
    let mut counts = NGramProfile::new();
    for n in 1..=n_max {
        for window in tokens.windows(n) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    counts
}

/// Counts of n-grams of exactly order `n`.
pub(crate) fn order_counts(tokens: &[String], n: usize) -> NGramProfile {
    let mut counts = NGramProfile::new();
    for window in tokens.windows(n) {
        *counts.entry(window.to_vec()).or_insert(0) += 1;
    }
    counts
}
