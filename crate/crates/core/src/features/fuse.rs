use super::matrix::Matrix;
use super::tsn::{tsn_test_indices, tsn_train_indices, SamplingMode, TsnConfig};
use crate::rng::derive_seed;
use crate::{Error, Result};

/// Per-frame features from one extractor.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSequence {
    pub name: String,
    pub fps: f64,
    frames: Matrix,
}

impl FeatureSequence {
    /// Validates that there is at least one frame of positive width and that
    /// every value is finite.
    pub fn new(name: impl Into<String>, fps: f64, frames: Matrix) -> Result<Self> {
        if frames.rows() == 0 || frames.cols() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "feature matrix must be non-empty, got {}x{}",
                frames.rows(),
                frames.cols()
            )));
        }
        if !(fps > 0.0 && fps.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "fps must be positive, got {fps}"
            )));
        }
        if let Some((row, col)) = frames.find_non_finite() {
            return Err(Error::NonFiniteValue { row, col });
        }
        Ok(Self {
            name: name.into(),
            fps,
            frames,
        })
    }

    pub fn frames(&self) -> &Matrix {
        &self.frames
    }

    pub fn n_frames(&self) -> usize {
        self.frames.rows()
    }

    pub fn dim(&self) -> usize {
        self.frames.cols()
    }

    pub fn into_frames(self) -> Matrix {
        self.frames
    }
}

/// Whether extractors draw train-mode indices independently or share one
/// stream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeedPolicy {
    /// Extractor `i` samples with `derive_seed(seed, i)`.
    #[default]
    Independent,
    /// Every extractor samples with `derive_seed(seed, 0)`.
    Shared,
}

/// Samples every sequence down to `k` rows and concatenates them row-wise,
/// in input order.
pub fn align_and_fuse(
    features: &[FeatureSequence],
    k: usize,
    mode: SamplingMode,
    seed: u64,
) -> Result<Matrix> {
    align_and_fuse_with(features, k, mode, seed, SeedPolicy::Independent)
}

pub fn align_and_fuse_with(
    features: &[FeatureSequence],
    k: usize,
    mode: SamplingMode,
    seed: u64,
    policy: SeedPolicy,
) -> Result<Matrix> {
    if features.is_empty() {
        return Err(Error::EmptyFeatureList);
    }
    let width: usize = features.iter().map(FeatureSequence::dim).sum();
    let mut fused = Matrix::zeros(k, width);
    let mut offset = 0;
    for (pos, feat) in features.iter().enumerate() {
        let indices = match mode {
            SamplingMode::Test => tsn_test_indices(feat.n_frames(), k)?,
            SamplingMode::Train => {
                let stream = match policy {
                    SeedPolicy::Independent => pos as u64,
                    SeedPolicy::Shared => 0,
                };
                let cfg = TsnConfig::new(k, derive_seed(seed, stream))?;
                tsn_train_indices(feat.n_frames(), &cfg)?
            }
        };
        for (row, &frame) in indices.iter().enumerate() {
            fused.row_mut(row)[offset..offset + feat.dim()].copy_from_slice(feat.frames.row(frame));
        }
        offset += feat.dim();
    }
    Ok(fused)
}
