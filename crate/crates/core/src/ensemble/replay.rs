use std::collections::BTreeMap;

use super::step_model::{StepModel, VideoContext};
use super::word_level::DISTRIBUTION_TOLERANCE;
use crate::captioner::{TokenId, Vocab, EOS};
use crate::{Error, Result};

/// Replays recorded per-step distributions, one trace per video.
///
/// Step `t` returns the `t`-th recorded vector regardless of the prefix
/// contents; past the end of the trace all mass goes to EOS.
#[derive(Clone, Debug)]
pub struct ReplayModel {
    vocab: Vocab,
    traces: BTreeMap<String, Vec<Vec<f64>>>,
    current: Option<String>,
}

impl ReplayModel {
    pub fn new(vocab: Vocab, traces: BTreeMap<String, Vec<Vec<f64>>>) -> Result<Self> {
        for (id, steps) in &traces {
            for (t, probs) in steps.iter().enumerate() {
                let total: f64 = probs.iter().sum();
                if probs.len() != vocab.len()
                    || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0))
                    || (total - 1.0).abs() > DISTRIBUTION_TOLERANCE
                {
                    return Err(Error::InvalidDistribution(format!(
                        "video `{id}` step {t}: {} entries summing to {total}",
                        probs.len()
                    )));
                }
            }
        }
        Ok(Self {
            vocab,
            traces,
            current: None,
        })
    }

    pub fn traces(&self) -> &BTreeMap<String, Vec<Vec<f64>>> {
        &self.traces
    }
}

impl StepModel for ReplayModel {
    fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    fn reset(&mut self, video: &VideoContext) -> Result<()> {
        if !self.traces.contains_key(&video.video_id) {
            return Err(Error::VideoIdMismatch(format!(
                "no trace recorded for video `{}`",
                video.video_id
            )));
        }
        self.current = Some(video.video_id.clone());
        Ok(())
    }

    fn step(&mut self, prefix: &[TokenId]) -> Result<Vec<f64>> {
        let id = self
            .current
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("step called before reset".into()))?;
        match self.traces[id].get(prefix.len()) {
            Some(probs) => Ok(probs.clone()),
            None => {
                let mut eos = vec![0.0; self.vocab.len()];
                eos[EOS] = 1.0;
                Ok(eos)
            }
        }
    }
}
