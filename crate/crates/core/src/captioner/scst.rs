//! Self-critical sequence training: REINFORCE on the CIDEr-D reward with
//! the greedy decode of the current parameters as the baseline.

use serde::Serialize;

use super::decode::{greedy_decode, sample_decode};
use super::model::ToyParams;
use super::vocab::{Vocab, BOS};
use super::xe::TrainExample;
use crate::metrics::{cider_d, tokenize, CorpusIdf};
use crate::rng::SplitMix64;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScstConfig {
    pub steps: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub samples_per_video: usize,
    pub max_len: usize,
}

impl Default for ScstConfig {
    fn default() -> Self {
        Self {
            steps: 200,
            learning_rate: 0.5,
            seed: 0,
            samples_per_video: 1,
            max_len: 12,
        }
    }
}

/// Batch means of one update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ScstDiagnostics {
    pub reward: f64,
    pub baseline: f64,
    pub advantage: f64,
}

fn reward(vocab: &Vocab, ids: &[usize], ex: &TrainExample, idf: &CorpusIdf) -> Result<f64> {
    cider_d(&tokenize(&vocab.decode(ids)), &ex.refs, idf)
}

/// One policy-gradient step over the whole batch.
///
/// For every sampled caption the advantage is `cider(sample) - cider(greedy)`;
/// the parameters move along `advantage * grad log p(sample)`, averaged over
/// all samples in the batch.
pub fn scst_update(
    params: &ToyParams,
    vocab: &Vocab,
    batch: &[TrainExample],
    idf: &CorpusIdf,
    cfg: &ScstConfig,
    rng: &mut SplitMix64,
) -> Result<(ToyParams, ScstDiagnostics)> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if cfg.samples_per_video == 0 {
        return Err(Error::InvalidArgument(
            "samples_per_video must be >= 1".into(),
        ));
    }
    let n_samples = (batch.len() * cfg.samples_per_video) as f64;
    let mut grad = ToyParams::zeros(params.vocab_size(), params.feature_dim());
    let mut moved = false;
    let mut diag = ScstDiagnostics::default();

    for ex in batch {
        let greedy = greedy_decode(params, &ex.cond, cfg.max_len)?;
        let baseline = reward(vocab, &greedy, ex, idf)?;
        let ctx = params.context_logits(&ex.cond)?;
        for _ in 0..cfg.samples_per_video {
            let sample = sample_decode(params, &ex.cond, cfg.max_len, rng)?;
            let r = reward(vocab, sample.tokens(), ex, idf)?;
            let advantage = r - baseline;
            diag.reward += r;
            diag.baseline += baseline;
            diag.advantage += advantage;
            if advantage == 0.0 {
                continue;
            }
            moved = true;
            let mut prev = BOS;
            for &tok in &sample.steps {
                let probs = params.step_probs(&ctx, prev);
                ToyParams::accumulate_log_prob_grad(
                    &mut grad,
                    &probs,
                    tok,
                    prev,
                    &ex.cond,
                    advantage / n_samples,
                );
                prev = tok;
            }
        }
    }
    diag.reward /= n_samples;
    diag.baseline /= n_samples;
    diag.advantage /= n_samples;

    let mut updated = params.clone();
    if moved {
        updated.add_scaled(&grad, cfg.learning_rate);
    }
    Ok((updated, diag))
}

/// `cfg.steps` consecutive updates driven by one generator seeded with
/// `cfg.seed`.
pub fn scst_train(
    params: &ToyParams,
    vocab: &Vocab,
    batch: &[TrainExample],
    idf: &CorpusIdf,
    cfg: &ScstConfig,
) -> Result<(ToyParams, Vec<ScstDiagnostics>)> {
    let mut rng = SplitMix64::new(cfg.seed);
    let mut params = params.clone();
    let mut history = Vec::with_capacity(cfg.steps);
    for _ in 0..cfg.steps {
        let (next, diag) = scst_update(&params, vocab, batch, idf, cfg, &mut rng)?;
        params = next;
        history.push(diag);
    }
    Ok((params, history))
}
