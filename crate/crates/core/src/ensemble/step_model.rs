use crate::captioner::{TokenId, Vocab};
use crate::features::Matrix;
use crate::metrics::TokenSequence;
use crate::Result;

/// Everything a step model may condition on for one video.
#[derive(Clone, Debug, PartialEq)]
pub struct VideoContext {
    pub video_id: String,
    pub fused: Option<Matrix>,
    pub subtitle: TokenSequence,
}

/// Produces next-token distributions for greedy ensemble decoding.
pub trait StepModel {
    fn vocab(&self) -> &Vocab;
    fn reset(&mut self, video: &VideoContext) -> Result<()>;
    /// Distribution over the vocabulary given the tokens emitted so far
    /// (BOS excluded).
    fn step(&mut self, prefix: &[TokenId]) -> Result<Vec<f64>>;
}
