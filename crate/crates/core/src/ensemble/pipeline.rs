use std::collections::{BTreeMap, BTreeSet};

use super::consensus::{build_pool_idf, sentence_consensus, CandidateSet};
use super::step_model::{StepModel, VideoContext};
use super::word_level::word_level_decode;
use crate::{Error, Result};

fn id_set(map: &BTreeMap<String, String>) -> BTreeSet<&str> {
    map.keys().map(String::as_str).collect()
}

/// Word-level ensemble first, then sentence-level consensus over the single
/// model captions plus the word-level caption (appended last).
///
/// With no models this is a plain sentence-level ensemble. Consensus IDF is
/// built from the whole candidate pool.
pub fn full_ensemble<M: StepModel + ?Sized>(
    models: &mut [Box<M>],
    single_outputs: &[BTreeMap<String, String>],
    videos: &BTreeMap<String, VideoContext>,
    max_len: usize,
) -> Result<BTreeMap<String, String>> {
    let ids: BTreeSet<&str> = match single_outputs.first() {
        Some(first) => id_set(first),
        None if !models.is_empty() => videos.keys().map(String::as_str).collect(),
        None => return Err(Error::EmptyPool),
    };
    for (i, out) in single_outputs.iter().enumerate() {
        let other = id_set(out);
        if other != ids {
            let diff: Vec<&str> = ids.symmetric_difference(&other).copied().collect();
            return Err(Error::VideoIdMismatch(format!(
                "input {i} differs from input 0 on {}",
                diff.join(", ")
            )));
        }
    }

    let mut sets = Vec::with_capacity(ids.len());
    for id in &ids {
        let mut candidates: Vec<String> = single_outputs.iter().map(|o| o[*id].clone()).collect();
        if !models.is_empty() {
            let ctx = videos
                .get(*id)
                .ok_or_else(|| Error::VideoIdMismatch(format!("no video context for `{id}`")))?;
            let tokens = word_level_decode(models, ctx, max_len)?;
            candidates.push(models[0].vocab().decode(&tokens));
        }
        sets.push(CandidateSet::new(*id, candidates)?);
    }

    let idf = build_pool_idf(&sets)?;
    sets.iter()
        .map(|set| Ok((set.video_id.clone(), sentence_consensus(set, &idf)?.winner)))
        .collect()
}
