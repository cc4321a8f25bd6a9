//! The bundled synthetic captioning task.
//!
//! Each video shows one subject performing one action. An appearance
//! extractor lights up the subject slot and a motion extractor lights up the
//! action slot. Some subjects carry an adjective that only the subtitle
//! reveals. A few videos show one subject chasing another; the second
//! subject's slot is lit at half intensity. Those captions repeat "a",
//! which a first-order model cannot reproduce exactly.

use std::collections::BTreeMap;

use super::vocab::Vocab;
use crate::features::{align_and_fuse, FeatureSequence, Matrix, SamplingMode};
use crate::metrics::{tokenize, TokenSequence};
use crate::rng::{derive_seed, SplitMix64};
use crate::Result;

pub const SUBJECTS: [&str; 8] = [
    "dog", "cat", "man", "woman", "child", "horse", "bird", "boy",
];
pub const ACTIONS: [&str; 8] = [
    "running", "jumping", "eating", "sitting", "playing", "swimming", "sleeping", "chasing",
];
pub const ADJECTIVES: [&str; 3] = ["red", "small", "big"];

const CHASING: usize = 7;
const FRAME_NOISE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub videos: usize,
    /// How many videos show a chase.
    pub chases: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            videos: 50,
            chases: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticVideo {
    pub video_id: String,
    /// Appearance then motion features.
    pub features: Vec<FeatureSequence>,
    pub subtitle: String,
    pub caption: String,
}

impl SyntheticVideo {
    pub fn fused(&self, k: usize) -> Result<Matrix> {
        align_and_fuse(&self.features, k, SamplingMode::Test, 0)
    }

    pub fn subtitle_tokens(&self) -> TokenSequence {
        tokenize(&self.subtitle)
    }

    pub fn reference(&self) -> TokenSequence {
        tokenize(&self.caption)
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticTask {
    pub vocab: Vocab,
    pub videos: Vec<SyntheticVideo>,
}

/// The fixed 25-entry vocabulary: reserved ids, "a", "is", subjects,
/// actions, adjectives.
pub fn vocabulary() -> Vocab {
    let words = ["a", "is"]
        .into_iter()
        .chain(SUBJECTS)
        .chain(ACTIONS)
        .chain(ADJECTIVES);
    Vocab::from_words(words).expect("static vocabulary is valid")
}

fn noisy_frames(rng: &mut SplitMix64, pattern: &[f64], n_frames: usize) -> Matrix {
    let mut m = Matrix::zeros(n_frames, pattern.len());
    for r in 0..n_frames {
        for (dst, &base) in m.row_mut(r).iter_mut().zip(pattern) {
            *dst = base + FRAME_NOISE * (2.0 * rng.next_f64() - 1.0);
        }
    }
    m
}

pub fn generate(spec: &SyntheticSpec) -> SyntheticTask {
    let mut rng = SplitMix64::new(spec.seed);
    let mut videos = Vec::with_capacity(spec.videos);
    for i in 0..spec.videos {
        let subject = rng.below(SUBJECTS.len() as u64) as usize;
        let mut appearance = vec![0.0; SUBJECTS.len()];
        let mut motion = vec![0.0; ACTIONS.len()];
        appearance[subject] = 1.0;
        let (caption, subtitle) = if i < spec.chases {
            let offset = 1 + rng.below(SUBJECTS.len() as u64 - 1) as usize;
            let target = (subject + offset) % SUBJECTS.len();
            appearance[target] = 0.5;
            motion[CHASING] = 1.0;
            (
                format!("a {} is chasing a {}", SUBJECTS[subject], SUBJECTS[target]),
                "look".to_string(),
            )
        } else {
            let action = rng.below(CHASING as u64) as usize;
            motion[action] = 1.0;
            let adjective = match rng.below(3) {
                0 => Some(ADJECTIVES[rng.below(ADJECTIVES.len() as u64) as usize]),
                _ => None,
            };
            match adjective {
                Some(adj) => (
                    format!("a {adj} {} is {}", SUBJECTS[subject], ACTIONS[action]),
                    format!("so {adj}"),
                ),
                None => (
                    format!("a {} is {}", SUBJECTS[subject], ACTIONS[action]),
                    "so".to_string(),
                ),
            }
        };
        let mut frame_rng = SplitMix64::new(derive_seed(spec.seed, i as u64 + 1));
        let n_app = 8 + frame_rng.below(17) as usize;
        let n_mot = 4 + frame_rng.below(9) as usize;
        let features = vec![
            FeatureSequence::new(
                "appearance",
                10.0,
                noisy_frames(&mut frame_rng, &appearance, n_app),
            )
            .expect("finite synthetic features"),
            FeatureSequence::new(
                "motion",
                10.0 / 3.0,
                noisy_frames(&mut frame_rng, &motion, n_mot),
            )
            .expect("finite synthetic features"),
        ];
        videos.push(SyntheticVideo {
            video_id: format!("video{i:03}"),
            features,
            subtitle,
            caption,
        });
    }
    SyntheticTask {
        vocab: vocabulary(),
        videos,
    }
}

impl SyntheticTask {
    pub fn references(&self) -> BTreeMap<String, Vec<TokenSequence>> {
        self.videos
            .iter()
            .map(|v| (v.video_id.clone(), vec![v.reference()]))
            .collect()
    }

    pub fn examples(&self, k: usize) -> Result<Vec<super::TrainExample>> {
        self.videos
            .iter()
            .map(|v| {
                Ok(super::TrainExample::new(
                    &self.vocab,
                    v.video_id.clone(),
                    &v.fused(k)?,
                    &v.subtitle_tokens(),
                    vec![v.reference()],
                ))
            })
            .collect()
    }
}
