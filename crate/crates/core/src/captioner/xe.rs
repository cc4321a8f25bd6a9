use serde::Serialize;

use super::model::{Conditioning, ToyParams};
use super::vocab::{TokenId, Vocab, BOS, EOS};
use crate::features::Matrix;
use crate::metrics::TokenSequence;
use crate::{Error, Result};

/// One training video: conditioning inputs plus its reference captions.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainExample {
    pub video_id: String,
    pub cond: Conditioning,
    pub refs: Vec<TokenSequence>,
    pub ref_ids: Vec<Vec<TokenId>>,
}

impl TrainExample {
    pub fn new(
        vocab: &Vocab,
        video_id: impl Into<String>,
        fused: &Matrix,
        subtitle: &TokenSequence,
        refs: Vec<TokenSequence>,
    ) -> Self {
        let ref_ids = refs.iter().map(|r| vocab.encode(r)).collect();
        Self {
            video_id: video_id.into(),
            cond: Conditioning::from_video(vocab, fused, subtitle),
            refs,
            ref_ids,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Seed for parameter initialisation, see [`TrainConfig::initial_params`].
    pub seed: u64,
    /// References are truncated to this many tokens before EOS.
    pub max_len: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 2000,
            seed: 0,
            max_len: 12,
        }
    }
}

/// Magnitude of the uniform noise used to initialise parameters.
pub const INIT_SCALE: f64 = 0.01;

impl TrainConfig {
    /// Small random parameters drawn from `self.seed`.
    pub fn initial_params(&self, vocab_size: usize, feature_dim: usize) -> ToyParams {
        ToyParams::random(vocab_size, feature_dim, INIT_SCALE, self.seed)
    }
}

/// Mean token-level negative log-likelihood of the references under
/// teacher forcing, and its gradient.
pub fn xe_loss_and_grad(
    params: &ToyParams,
    data: &[TrainExample],
    max_len: usize,
) -> Result<(f64, ToyParams)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let targets: usize = data
        .iter()
        .flat_map(|ex| &ex.ref_ids)
        .map(|r| r.len().min(max_len) + 1)
        .sum();
    let weight = 1.0 / targets as f64;

    let mut grad = ToyParams::zeros(params.vocab_size(), params.feature_dim());
    let mut nll = 0.0;
    for ex in data {
        let ctx = params.context_logits(&ex.cond)?;
        for r in &ex.ref_ids {
            let body = &r[..r.len().min(max_len)];
            let mut prev = BOS;
            for &target in body.iter().chain(std::iter::once(&EOS)) {
                if target >= params.vocab_size() {
                    return Err(Error::ShapeMismatch(format!(
                        "token id {target} outside vocabulary"
                    )));
                }
                let probs = params.step_probs(&ctx, prev);
                nll -= probs[target].ln();
                ToyParams::accumulate_log_prob_grad(
                    &mut grad, &probs, target, prev, &ex.cond, -weight,
                );
                prev = target;
            }
        }
    }
    Ok((nll * weight, grad))
}

#[derive(Clone, Debug)]
pub struct XeOutcome {
    pub params: ToyParams,
    /// Loss before each epoch's update, then the final loss.
    pub loss_curve: Vec<f64>,
}

/// Full-batch gradient descent on the cross-entropy objective.
pub fn xe_train(params: &ToyParams, data: &[TrainExample], cfg: &TrainConfig) -> Result<XeOutcome> {
    if !(cfg.learning_rate >= 0.0 && cfg.learning_rate.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "learning rate must be non-negative, got {}",
            cfg.learning_rate
        )));
    }
    let mut params = params.clone();
    let mut loss_curve = Vec::with_capacity(cfg.epochs + 1);
    for _ in 0..cfg.epochs {
        let (loss, grad) = xe_loss_and_grad(&params, data, cfg.max_len)?;
        loss_curve.push(loss);
        params.add_scaled(&grad, -cfg.learning_rate);
    }
    loss_curve.push(xe_loss_and_grad(&params, data, cfg.max_len)?.0);
    Ok(XeOutcome { params, loss_curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::captioner::greedy_decode;
    use crate::metrics::tokenize;

    fn example(vocab: &Vocab, id: &str, v: Vec<f64>, caption: &str) -> TrainExample {
        let fused = Matrix::from_rows(&[v]).unwrap();
        TrainExample::new(vocab, id, &fused, &tokenize(""), vec![tokenize(caption)])
    }

    #[test]
    fn fits_single_token_caption() {
        let vocab = Vocab::from_words(["hello", "world"]).unwrap();
        let data = [example(&vocab, "v", vec![1.0, 0.0], "world")];
        let cfg = TrainConfig {
            learning_rate: 0.5,
            epochs: 200,
            seed: 0,
            max_len: 5,
        };
        let out = xe_train(&ToyParams::zeros(vocab.len(), 2), &data, &cfg).unwrap();
        let decoded = greedy_decode(&out.params, &data[0].cond, 5).unwrap();
        assert_eq!(vocab.decode(&decoded), "world");
    }

    #[test]
    fn zero_learning_rate_is_identity() {
        let vocab = Vocab::from_words(["a", "b"]).unwrap();
        let data = [example(&vocab, "v", vec![0.3], "a b")];
        let start = ToyParams::random(vocab.len(), 1, 0.5, 2);
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 5,
            seed: 0,
            max_len: 5,
        };
        let out = xe_train(&start, &data, &cfg).unwrap();
        assert_eq!(out.params, start);
        assert!(out.loss_curve.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn loss_decreases_on_small_set() {
        let vocab = Vocab::from_words(["a", "dog", "cat", "runs", "sits"]).unwrap();
        let data = [
            example(&vocab, "1", vec![1.0, 0.0], "a dog runs"),
            example(&vocab, "2", vec![0.0, 1.0], "a cat sits"),
            example(&vocab, "3", vec![1.0, 1.0], "a dog sits"),
            example(&vocab, "4", vec![0.5, 0.0], "a dog"),
            example(&vocab, "5", vec![0.0, 0.5], "a cat runs"),
        ];
        let cfg = TrainConfig {
            learning_rate: 0.1,
            epochs: 50,
            seed: 0,
            max_len: 8,
        };
        let out = xe_train(&ToyParams::zeros(vocab.len(), 2), &data, &cfg).unwrap();
        let first = out.loss_curve[0];
        let last = *out.loss_curve.last().unwrap();
        assert!(last < first);
        assert!(out.loss_curve.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn empty_dataset() {
        let p = ToyParams::zeros(5, 1);
        assert!(matches!(
            xe_train(&p, &[], &TrainConfig::default()),
            Err(Error::EmptyDataset)
        ));
    }
}
