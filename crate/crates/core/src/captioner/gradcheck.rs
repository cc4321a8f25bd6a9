//! Central finite-difference validation of the analytic gradients.

use serde::Serialize;

use super::model::{Conditioning, ToyParams};
use super::vocab::{TokenId, Vocab, BOS, EOS};
use super::xe::{xe_loss_and_grad, TrainExample};
use crate::features::Matrix;
use crate::metrics::tokenize;
use crate::rng::SplitMix64;
use crate::Result;

/// Finite-difference step.
const STEP: f64 = 1e-5;
/// Gradients smaller than this are compared in absolute terms.
const REL_FLOOR: f64 = 1e-6;

/// Parameters, an XE dataset and one sampled path to differentiate.
#[derive(Clone, Debug)]
pub struct GradCheckInstance {
    pub params: ToyParams,
    pub data: Vec<TrainExample>,
    pub max_len: usize,
    pub path_cond: Conditioning,
    pub path: Vec<TokenId>,
}

impl GradCheckInstance {
    /// Small random instance: 6-word vocabulary, 3-dim features, two videos,
    /// a 4-token path ending in EOS. `param_scale = 0` gives zero parameters.
    pub fn random(seed: u64, param_scale: f64) -> Self {
        let vocab = Vocab::from_words(["a", "dog", "cat", "runs", "sits", "red"]).unwrap();
        let v = vocab.len();
        let dim = 3;
        let mut rng = SplitMix64::new(seed);
        let uniform = |rng: &mut SplitMix64| 2.0 * rng.next_f64() - 1.0;
        let video = |rng: &mut SplitMix64, caption: &str, subtitle: &str| {
            let rows: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..dim).map(|_| uniform(rng)).collect())
                .collect();
            let fused = Matrix::from_rows(&rows).unwrap();
            TrainExample::new(
                &vocab,
                "v",
                &fused,
                &tokenize(subtitle),
                vec![tokenize(caption)],
            )
        };
        let data = vec![
            video(&mut rng, "a red dog runs", "so red"),
            video(&mut rng, "a cat sits a cat", "meow"),
        ];
        let params = if param_scale == 0.0 {
            ToyParams::zeros(v, dim)
        } else {
            ToyParams::random(v, dim, param_scale, rng.next_u64())
        };
        let path_cond = data[0].cond.clone();
        let mut path: Vec<TokenId> = (0..3)
            .map(|_| 4 + rng.below((v - 4) as u64) as usize)
            .collect();
        path.push(EOS);
        Self {
            params,
            data,
            max_len: 8,
            path_cond,
            path,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GradCheckReport {
    pub xe_max_rel_err: f64,
    pub path_max_rel_err: f64,
}

impl GradCheckReport {
    pub fn max_rel_err(&self) -> f64 {
        self.xe_max_rel_err.max(self.path_max_rel_err)
    }
}

/// `sum_t log p(path_t)` and its analytic gradient.
pub(crate) fn path_log_prob_and_grad(
    params: &ToyParams,
    cond: &Conditioning,
    path: &[TokenId],
) -> Result<(f64, ToyParams)> {
    let ctx = params.context_logits(cond)?;
    let mut grad = ToyParams::zeros(params.vocab_size(), params.feature_dim());
    let mut total = 0.0;
    let mut prev = BOS;
    for &tok in path {
        let probs = params.step_probs(&ctx, prev);
        total += probs[tok].ln();
        ToyParams::accumulate_log_prob_grad(&mut grad, &probs, tok, prev, cond, 1.0);
        prev = tok;
    }
    Ok((total, grad))
}

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_FLOOR)
}

/// Largest relative error between `analytic` and central differences of `f`
/// over every parameter.
fn compare<F>(params: &ToyParams, analytic: &ToyParams, mut f: F) -> Result<f64>
where
    F: FnMut(&ToyParams) -> Result<f64>,
{
    let mut probe = params.clone();
    let mut worst: f64 = 0.0;
    for block in 0..4 {
        for i in 0..params.blocks()[block].len() {
            let orig = params.blocks()[block][i];
            probe.blocks_mut()[block][i] = orig + STEP;
            let up = f(&probe)?;
            probe.blocks_mut()[block][i] = orig - STEP;
            let down = f(&probe)?;
            probe.blocks_mut()[block][i] = orig;
            let numeric = (up - down) / (2.0 * STEP);
            worst = worst.max(rel_err(analytic.blocks()[block][i], numeric));
        }
    }
    Ok(worst)
}

/// Checks both the XE loss gradient and the sampled-path log-probability
/// gradient against central differences.
pub fn gradient_check(instance: &GradCheckInstance) -> Result<GradCheckReport> {
    let (_, xe_grad) = xe_loss_and_grad(&instance.params, &instance.data, instance.max_len)?;
    let xe_max_rel_err = compare(&instance.params, &xe_grad, |p| {
        Ok(xe_loss_and_grad(p, &instance.data, instance.max_len)?.0)
    })?;
    let (_, path_grad) =
        path_log_prob_and_grad(&instance.params, &instance.path_cond, &instance.path)?;
    let path_max_rel_err = compare(&instance.params, &path_grad, |p| {
        Ok(path_log_prob_and_grad(p, &instance.path_cond, &instance.path)?.0)
    })?;
    Ok(GradCheckReport {
        xe_max_rel_err,
        path_max_rel_err,
    })
}
