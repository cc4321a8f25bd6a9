//! Frame and clip index arithmetic plus multi-extractor feature assembly.

mod bimodal;
mod fuse;
mod matrix;
mod tsn;
mod windows;

pub use bimodal::{assemble_bimodal, TokenTypedSequence, TEXT_TYPE_ID, VIDEO_TYPE_ID};
pub use fuse::{align_and_fuse, align_and_fuse_with, FeatureSequence, SeedPolicy};
pub use matrix::Matrix;
pub use tsn::{tsn_test_indices, tsn_train_indices, SamplingMode, TsnConfig, DEFAULT_SEGMENTS};
pub use windows::{sliding_windows, Clip, ClipWindowSchedule, DEFAULT_STRIDE_S, DEFAULT_WINDOW_S};
