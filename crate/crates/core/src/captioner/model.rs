use super::vocab::{TokenId, Vocab, BOS, PAD};
use crate::ensemble::{StepModel, VideoContext};
use crate::features::Matrix;
use crate::metrics::TokenSequence;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Weights of the log-linear captioner.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyParams {
    /// `V x V`, column `prev` holds the logit contribution of the previous token.
    pub w_prev: Matrix,
    /// `V x D`, applied to the mean fused video feature.
    pub w_vid: Matrix,
    /// `V x V`, applied to the subtitle bag of words.
    pub w_sub: Matrix,
    pub b: Vec<f64>,
}

impl ToyParams {
    pub fn zeros(vocab_size: usize, feature_dim: usize) -> Self {
        Self {
            w_prev: Matrix::zeros(vocab_size, vocab_size),
            w_vid: Matrix::zeros(vocab_size, feature_dim),
            w_sub: Matrix::zeros(vocab_size, vocab_size),
            b: vec![0.0; vocab_size],
        }
    }

    /// Every entry drawn uniformly from `[-scale, scale)`.
    pub fn random(vocab_size: usize, feature_dim: usize, scale: f64, seed: u64) -> Self {
        let mut p = Self::zeros(vocab_size, feature_dim);
        let mut rng = SplitMix64::new(seed);
        for block in p.blocks_mut() {
            for x in block.iter_mut() {
                *x = scale * (2.0 * rng.next_f64() - 1.0);
            }
        }
        p
    }

    /// Assembles parameters, checking that the shapes agree.
    pub fn new(w_prev: Matrix, w_vid: Matrix, w_sub: Matrix, b: Vec<f64>) -> Result<Self> {
        let v = b.len();
        if w_prev.shape() != (v, v) || w_sub.shape() != (v, v) || w_vid.rows() != v {
            return Err(Error::ShapeMismatch(format!(
                "vocab {v}: w_prev {:?}, w_vid {:?}, w_sub {:?}",
                w_prev.shape(),
                w_vid.shape(),
                w_sub.shape()
            )));
        }
        let p = Self {
            w_prev,
            w_vid,
            w_sub,
            b,
        };
        if p.blocks()
            .iter()
            .any(|blk| blk.iter().any(|x| !x.is_finite()))
        {
            return Err(Error::InvalidArgument("parameters must be finite".into()));
        }
        Ok(p)
    }

    pub fn vocab_size(&self) -> usize {
        self.b.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.w_vid.cols()
    }

    pub fn num_params(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }

    /// Parameter storage in a fixed order: `w_prev`, `w_vid`, `w_sub`, `b`.
    pub fn blocks(&self) -> [&[f64]; 4] {
        [
            self.w_prev.as_slice(),
            self.w_vid.as_slice(),
            self.w_sub.as_slice(),
            &self.b,
        ]
    }

    pub fn blocks_mut(&mut self) -> [&mut [f64]; 4] {
        [
            self.w_prev.as_mut_slice(),
            self.w_vid.as_mut_slice(),
            self.w_sub.as_mut_slice(),
            &mut self.b,
        ]
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, other: &ToyParams, alpha: f64) {
        if alpha == 0.0 {
            return;
        }
        for (dst, src) in self.blocks_mut().into_iter().zip(other.blocks()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += alpha * s;
            }
        }
    }

    fn check(&self, cond: &Conditioning) -> Result<()> {
        if cond.v_mean.len() != self.feature_dim() || cond.sub_bow.len() != self.vocab_size() {
            return Err(Error::ShapeMismatch(format!(
                "model expects video width {} and vocab {}, got {} and {}",
                self.feature_dim(),
                self.vocab_size(),
                cond.v_mean.len(),
                cond.sub_bow.len()
            )));
        }
        Ok(())
    }

    /// `b + W_vid v + W_sub s`: the part of the logits fixed for a video.
    pub(crate) fn context_logits(&self, cond: &Conditioning) -> Result<Vec<f64>> {
        self.check(cond)?;
        let mut z = self.b.clone();
        for (j, zj) in z.iter_mut().enumerate() {
            *zj += dot(self.w_vid.row(j), &cond.v_mean);
            for &(w, c) in &cond.sub_nonzero {
                *zj += self.w_sub.get(j, w) * c;
            }
        }
        Ok(z)
    }

    /// Next-token distribution given precomputed context logits.
    pub(crate) fn step_probs(&self, context: &[f64], prev: TokenId) -> Vec<f64> {
        let z: Vec<f64> = context
            .iter()
            .enumerate()
            .map(|(j, c)| c + self.w_prev.get(j, prev))
            .collect();
        masked_softmax(&z)
    }

    /// Adds `weight * d log p(target) / d params` to `grad`, where `probs` is
    /// the distribution produced at this step.
    pub(crate) fn accumulate_log_prob_grad(
        grad: &mut ToyParams,
        probs: &[f64],
        target: TokenId,
        prev: TokenId,
        cond: &Conditioning,
        weight: f64,
    ) {
        for (j, &p) in probs.iter().enumerate() {
            if j == PAD {
                continue;
            }
            let g = weight * (if j == target { 1.0 } else { 0.0 } - p);
            if g == 0.0 {
                continue;
            }
            grad.b[j] += g;
            *grad.w_prev.get_mut(j, prev) += g;
            for (dst, v) in grad.w_vid.row_mut(j).iter_mut().zip(&cond.v_mean) {
                *dst += g * v;
            }
            for &(w, c) in &cond.sub_nonzero {
                *grad.w_sub.get_mut(j, w) += g * c;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Softmax over every id except PAD, which gets exactly zero.
fn masked_softmax(z: &[f64]) -> Vec<f64> {
    let max = z[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(j, &x)| if j == PAD { 0.0 } else { (x - max).exp() })
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// Per-video inputs of the captioner.
#[derive(Clone, Debug, PartialEq)]
pub struct Conditioning {
    pub v_mean: Vec<f64>,
    pub sub_bow: Vec<f64>,
    sub_nonzero: Vec<(usize, f64)>,
}

impl Conditioning {
    pub fn new(v_mean: Vec<f64>, sub_bow: Vec<f64>) -> Self {
        let sub_nonzero = sub_bow
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (i, c))
            .collect();
        Self {
            v_mean,
            sub_bow,
            sub_nonzero,
        }
    }

    /// Column mean of `fused` and the subtitle's bag of words.
    pub fn from_video(vocab: &Vocab, fused: &Matrix, subtitle: &TokenSequence) -> Self {
        Self::new(fused.column_mean(), vocab.bag_of_words(subtitle))
    }
}

/// `softmax(b + W_prev[:, prev] + W_vid v_mean + W_sub sub_bow)` with PAD
/// masked out.
pub fn forward_step(
    params: &ToyParams,
    prev: TokenId,
    v_mean: &[f64],
    sub_bow: &[f64],
) -> Result<Vec<f64>> {
    if prev >= params.vocab_size() {
        return Err(Error::ShapeMismatch(format!(
            "token id {prev} outside vocabulary of {}",
            params.vocab_size()
        )));
    }
    let cond = Conditioning::new(v_mean.to_vec(), sub_bow.to_vec());
    let ctx = params.context_logits(&cond)?;
    Ok(params.step_probs(&ctx, prev))
}

/// A trained toy model exposed as a [`StepModel`] for ensembling.
#[derive(Clone, Debug)]
pub struct ToyStepModel {
    params: ToyParams,
    vocab: Vocab,
    context: Option<Vec<f64>>,
}

impl ToyStepModel {
    pub fn new(params: ToyParams, vocab: Vocab) -> Result<Self> {
        if params.vocab_size() != vocab.len() {
            return Err(Error::ShapeMismatch(format!(
                "parameters cover {} tokens, vocabulary has {}",
                params.vocab_size(),
                vocab.len()
            )));
        }
        Ok(Self {
            params,
            vocab,
            context: None,
        })
    }

    pub fn params(&self) -> &ToyParams {
        &self.params
    }
}

impl StepModel for ToyStepModel {
    fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    fn reset(&mut self, video: &VideoContext) -> Result<()> {
        let fused = video.fused.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!("video `{}` has no features", video.video_id))
        })?;
        let cond = Conditioning::from_video(&self.vocab, fused, &video.subtitle);
        self.context = Some(self.params.context_logits(&cond)?);
        Ok(())
    }

    fn step(&mut self, prefix: &[TokenId]) -> Result<Vec<f64>> {
        let ctx = self
            .context
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("step called before reset".into()))?;
        let prev = prefix.last().copied().unwrap_or(BOS);
        if prev >= self.params.vocab_size() {
            return Err(Error::ShapeMismatch(format!(
                "token id {prev} outside vocabulary"
            )));
        }
        Ok(self.params.step_probs(ctx, prev))
    }
}
