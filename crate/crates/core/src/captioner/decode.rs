use super::model::{Conditioning, ToyParams};
use super::vocab::{TokenId, BOS, EOS};
use crate::rng::SplitMix64;
use crate::Result;

/// Index of the largest entry; the lowest index wins exact ties.
pub fn argmax(probs: &[f64]) -> TokenId {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate().skip(1) {
        if p > probs[best] {
            best = i;
        }
    }
    best
}

/// Greedy caption without BOS/EOS, at most `max_len` tokens.
pub fn greedy_decode(
    params: &ToyParams,
    cond: &Conditioning,
    max_len: usize,
) -> Result<Vec<TokenId>> {
    let ctx = params.context_logits(cond)?;
    let mut out = Vec::new();
    let mut prev = BOS;
    while out.len() < max_len {
        let next = argmax(&params.step_probs(&ctx, prev));
        if next == EOS {
            break;
        }
        out.push(next);
        prev = next;
    }
    Ok(out)
}

/// Greedy decode that also returns the distribution behind every choice,
/// including the final EOS step when one was taken.
pub fn greedy_decode_traced(
    params: &ToyParams,
    cond: &Conditioning,
    max_len: usize,
) -> Result<(Vec<TokenId>, Vec<Vec<f64>>)> {
    let ctx = params.context_logits(cond)?;
    let mut out = Vec::new();
    let mut steps = Vec::new();
    let mut prev = BOS;
    while out.len() < max_len {
        let probs = params.step_probs(&ctx, prev);
        let next = argmax(&probs);
        steps.push(probs);
        if next == EOS {
            break;
        }
        out.push(next);
        prev = next;
    }
    Ok((out, steps))
}

/// A caption drawn from the model with the log-probability of every draw.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCaption {
    /// Drawn tokens, including a final EOS when one was drawn.
    pub steps: Vec<TokenId>,
    pub log_probs: Vec<f64>,
}

impl SampledCaption {
    /// The caption without its terminating EOS.
    pub fn tokens(&self) -> &[TokenId] {
        match self.steps.last() {
            Some(&EOS) => &self.steps[..self.steps.len() - 1],
            _ => &self.steps,
        }
    }

    pub fn log_prob(&self) -> f64 {
        self.log_probs.iter().sum()
    }
}

/// Inverse-CDF draw; falls back to the last id with positive mass.
fn draw(probs: &[f64], rng: &mut SplitMix64) -> TokenId {
    let u = rng.next_f64();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if p > 0.0 && u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(EOS)
}

/// Ancestral sampling; stops after EOS or `max_len` non-EOS tokens.
pub fn sample_decode(
    params: &ToyParams,
    cond: &Conditioning,
    max_len: usize,
    rng: &mut SplitMix64,
) -> Result<SampledCaption> {
    let ctx = params.context_logits(cond)?;
    let mut sample = SampledCaption {
        steps: Vec::new(),
        log_probs: Vec::new(),
    };
    let mut prev = BOS;
    while sample.steps.len() < max_len {
        let probs = params.step_probs(&ctx, prev);
        let next = draw(&probs, rng);
        sample.steps.push(next);
        sample.log_probs.push(probs[next].ln());
        if next == EOS {
            break;
        }
        prev = next;
    }
    Ok(sample)
}
