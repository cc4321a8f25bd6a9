//! Log-linear toy captioner trained with cross-entropy and then with
//! self-critical sequence training on the CIDEr-D reward.
//!
//! Next-token logits are `b + W_prev[:, prev] + W_vid v + W_sub s`, where
//! `v` is the column mean of the fused video matrix and `s` the subtitle
//! bag of words. PAD never receives probability mass.

mod decode;
mod gradcheck;
mod model;
mod scst;
pub mod synthetic;
mod vocab;
mod xe;

pub use decode::{argmax, greedy_decode, greedy_decode_traced, sample_decode, SampledCaption};
pub use gradcheck::{gradient_check, GradCheckInstance, GradCheckReport};
pub use model::{forward_step, Conditioning, ToyParams, ToyStepModel};
pub use scst::{scst_train, scst_update, ScstConfig, ScstDiagnostics};
pub use vocab::{TokenId, Vocab, BOS, EOS, PAD, UNK};
pub use xe::{xe_loss_and_grad, xe_train, TrainConfig, TrainExample, XeOutcome, INIT_SCALE};
