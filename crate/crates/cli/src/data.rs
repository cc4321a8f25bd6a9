//! The on-disk layout shared by `synth`, `train` and `decode`:
//!
//! ```text
//! <dir>/refs.jsonl                       reference captions per video
//! <dir>/subtitles.jsonl                  one subtitle string per video
//! <dir>/features/<video_id>/<name>.cff1  feature sequences, fused in file-name order
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use capkit::captioner::synthetic::SyntheticTask;
use capkit::features::{align_and_fuse, FeatureSequence, Matrix, SamplingMode};
use capkit::io::{
    hypotheses, read_features, references, write_captions, write_features, CaptionRecord,
};
use capkit::rng::derive_seed;
use capkit::{tokenize, TokenSequence};

use crate::error::{CliError, CliResult};

pub const REFS_FILE: &str = "refs.jsonl";
pub const SUBTITLES_FILE: &str = "subtitles.jsonl";
pub const FEATURES_DIR: &str = "features";

pub struct Video {
    pub video_id: String,
    pub features: Vec<FeatureSequence>,
    pub subtitle: TokenSequence,
}

pub struct DataDir {
    pub root: PathBuf,
    pub videos: Vec<Video>,
}

fn feature_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "cff1"));
    files.sort();
    Ok(files)
}

impl DataDir {
    /// Loads subtitles and features; every subtitle needs a feature folder
    /// and vice versa.
    pub fn load(root: &Path) -> CliResult<Self> {
        let subtitles = hypotheses(root.join(SUBTITLES_FILE))?;
        let feat_root = root.join(FEATURES_DIR);
        let mut on_disk = Vec::new();
        for entry in fs::read_dir(&feat_root)? {
            let entry = entry?;
            if entry.file_type()?.is_dir() {
                on_disk.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        on_disk.sort();
        let listed: Vec<&String> = subtitles.keys().collect();
        if on_disk.iter().collect::<Vec<_>>() != listed {
            return Err(CliError::IdMismatch(format!(
                "{} lists {} videos, {} has {}",
                SUBTITLES_FILE,
                listed.len(),
                feat_root.display(),
                on_disk.len()
            )));
        }

        let mut videos = Vec::with_capacity(subtitles.len());
        for (video_id, subtitle) in subtitles {
            let files = feature_files(&feat_root.join(&video_id))?;
            if files.is_empty() {
                return Err(CliError::MissingPrerequisite(format!(
                    "no .cff1 features for `{video_id}`"
                )));
            }
            let features = files
                .iter()
                .map(read_features)
                .collect::<Result<Vec<_>, _>>()?;
            videos.push(Video {
                video_id,
                features,
                subtitle: tokenize(&subtitle),
            });
        }
        Ok(Self {
            root: root.to_path_buf(),
            videos,
        })
    }

    /// Reference captions, which must cover exactly the loaded videos.
    pub fn references(&self) -> CliResult<BTreeMap<String, Vec<TokenSequence>>> {
        let refs = references(self.root.join(REFS_FILE))?;
        let ids: Vec<&String> = self.videos.iter().map(|v| &v.video_id).collect();
        if refs.keys().collect::<Vec<_>>() != ids {
            let missing: Vec<&str> = ids
                .iter()
                .filter(|id| !refs.contains_key(id.as_str()))
                .map(|id| id.as_str())
                .collect();
            return Err(CliError::IdMismatch(format!(
                "{REFS_FILE} does not match the feature folders (missing: {})",
                missing.join(", ")
            )));
        }
        Ok(refs
            .into_iter()
            .map(|(id, caps)| (id, caps.iter().map(|c| tokenize(c)).collect()))
            .collect())
    }
}

impl Video {
    /// Fused features; train mode derives a per-video seed from `seed`.
    pub fn fused(
        &self,
        index: usize,
        k: usize,
        mode: SamplingMode,
        seed: u64,
    ) -> CliResult<Matrix> {
        let seed = derive_seed(seed, index as u64);
        Ok(align_and_fuse(&self.features, k, mode, seed)?)
    }
}

/// Writes a synthetic task in the data-directory layout.
pub fn write_synthetic(task: &SyntheticTask, root: &Path) -> CliResult<()> {
    fs::create_dir_all(root.join(FEATURES_DIR))?;
    let refs: Vec<CaptionRecord> = task
        .videos
        .iter()
        .map(|v| CaptionRecord::references(v.video_id.clone(), vec![v.caption.clone()]))
        .collect();
    write_captions(root.join(REFS_FILE), &refs)?;
    let subs: Vec<CaptionRecord> = task
        .videos
        .iter()
        .map(|v| CaptionRecord::hypothesis(v.video_id.clone(), v.subtitle.clone()))
        .collect();
    write_captions(root.join(SUBTITLES_FILE), &subs)?;
    for v in &task.videos {
        let dir = root.join(FEATURES_DIR).join(&v.video_id);
        fs::create_dir_all(&dir)?;
        for (i, f) in v.features.iter().enumerate() {
            write_features(dir.join(format!("{i}_{}.cff1", f.name)), f)?;
        }
    }
    Ok(())
}
