//! TSN-style sparse sampling of `k` frames out of `n`.
//!
//! Segment `i` covers `[floor(i n / k), floor((i + 1) n / k))`. Training
//! draws one uniform frame per segment; testing takes segment centres,
//! `floor((i + 0.5) n / k)`, evaluated in exact integer arithmetic.

use serde::{Deserialize, Serialize};

use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Segment count used when none is given.
pub const DEFAULT_SEGMENTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    Train,
    Test,
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Self::Train),
            "test" => Ok(Self::Test),
            other => Err(Error::InvalidArgument(format!(
                "unknown sampling mode `{other}` (expected train or test)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TsnConfig {
    k: usize,
    pub seed: u64,
}

impl TsnConfig {
    pub fn new(k: usize, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "segment count k must be >= 1".into(),
            ));
        }
        Ok(Self { k, seed })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

fn check_frames(n_frames: usize) -> Result<()> {
    if n_frames == 0 {
        return Err(Error::InvalidArgument("n_frames must be >= 1".into()));
    }
    Ok(())
}

/// One random frame per segment.
///
/// With fewer frames than segments the sequence is padded by repeating the
/// last frame, and the test-mode centres of the padded sequence are used.
pub fn tsn_train_indices(n_frames: usize, cfg: &TsnConfig) -> Result<Vec<usize>> {
    check_frames(n_frames)?;
    let k = cfg.k;
    if n_frames < k {
        return Ok(centres(k, k).map(|i| i.min(n_frames - 1)).collect());
    }
    let mut rng = SplitMix64::new(cfg.seed);
    Ok((0..k)
        .map(|i| {
            let start = i * n_frames / k;
            let end = (i + 1) * n_frames / k;
            start + rng.below((end - start) as u64) as usize
        })
        .collect())
}

/// Segment centres, clamped to the last frame.
pub fn tsn_test_indices(n_frames: usize, k: usize) -> Result<Vec<usize>> {
    check_frames(n_frames)?;
    if k == 0 {
        return Err(Error::InvalidArgument(
            "segment count k must be >= 1".into(),
        ));
    }
    Ok(centres(n_frames, k).map(|i| i.min(n_frames - 1)).collect())
}

fn centres(n: usize, k: usize) -> impl Iterator<Item = usize> {
    (0..k).map(move |i| ((2 * i + 1) * n) / (2 * k))
}
