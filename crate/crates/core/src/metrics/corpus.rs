use std::collections::BTreeMap;

use serde::Serialize;

use super::bleu::BleuStats;
use super::{cider_d, rouge_l, CorpusIdf, TokenSequence};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VideoScores {
    pub bleu4: f64,
    pub rouge_l: f64,
    pub cider_d: f64,
}

/// Corpus-level scores plus the per-video breakdown.
///
/// `bleu4` pools clipped counts across videos; `rouge_l` and `cider_d` are
/// means of the per-video scores.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub bleu4: f64,
    pub rouge_l: f64,
    pub cider_d: f64,
    pub per_video: BTreeMap<String, VideoScores>,
}

/// Scores every hypothesis against its references. IDF statistics come
/// from the full reference set.
pub fn corpus_eval(
    hyps: &BTreeMap<String, TokenSequence>,
    refs: &BTreeMap<String, Vec<TokenSequence>>,
) -> Result<MetricReport> {
    if hyps.is_empty() {
        return Err(Error::MissingInput);
    }
    if let Some(id) = hyps.keys().find(|id| !refs.contains_key(*id)) {
        return Err(Error::MissingReference(id.clone()));
    }
    let idf = CorpusIdf::build(refs.iter().map(|(id, r)| (id, r.as_slice())))?;

    let mut pooled = BleuStats::default();
    let mut per_video = BTreeMap::new();
    for (id, hyp) in hyps {
        let video_refs = &refs[id];
        let stats = BleuStats::from_pair(hyp, video_refs)?;
        pooled.accumulate(&stats);
        per_video.insert(
            id.clone(),
            VideoScores {
                bleu4: stats.score(),
                rouge_l: rouge_l(hyp, video_refs)?,
                cider_d: cider_d(hyp, video_refs, &idf)?,
            },
        );
    }
    let n = per_video.len() as f64;
    Ok(MetricReport {
        bleu4: pooled.score(),
        rouge_l: per_video.values().map(|s| s.rouge_l).sum::<f64>() / n,
        cider_d: per_video.values().map(|s| s.cider_d).sum::<f64>() / n,
        per_video,
    })
}
