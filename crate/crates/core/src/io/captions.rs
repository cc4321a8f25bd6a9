use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parse_error;
use crate::{Error, Result};

/// A hypothesis (`caption`) or a reference list (`captions`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaptionText {
    Hypothesis(String),
    References(Vec<String>),
}

/// One line of a caption file:
/// `{"video_id": "...", "caption": "..."}` or
/// `{"video_id": "...", "captions": ["...", ...]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaptionRecord {
    pub video_id: String,
    pub text: CaptionText,
}

impl CaptionRecord {
    pub fn hypothesis(video_id: impl Into<String>, caption: impl Into<String>) -> Self {
        Self {
            video_id: video_id.into(),
            text: CaptionText::Hypothesis(caption.into()),
        }
    }

    pub fn references(video_id: impl Into<String>, captions: Vec<String>) -> Self {
        Self {
            video_id: video_id.into(),
            text: CaptionText::References(captions),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    video_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    caption: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    captions: Option<Vec<String>>,
}

impl RawRecord {
    fn validate(self) -> std::result::Result<CaptionRecord, String> {
        if self.video_id.is_empty() {
            return Err("empty video_id".into());
        }
        let text = match (self.caption, self.captions) {
            (Some(c), None) => CaptionText::Hypothesis(c),
            (None, Some(cs)) if cs.is_empty() => return Err("empty reference list".into()),
            (None, Some(cs)) => CaptionText::References(cs),
            (Some(_), Some(_)) => return Err("both `caption` and `captions` present".into()),
            (None, None) => return Err("missing `caption` or `captions`".into()),
        };
        Ok(CaptionRecord {
            video_id: self.video_id,
            text,
        })
    }
}

impl From<&CaptionRecord> for RawRecord {
    fn from(r: &CaptionRecord) -> Self {
        let (caption, captions) = match &r.text {
            CaptionText::Hypothesis(c) => (Some(c.clone()), None),
            CaptionText::References(cs) => (None, Some(cs.clone())),
        };
        RawRecord {
            video_id: r.video_id.clone(),
            caption,
            captions,
        }
    }
}

/// Reads a caption file. Blank lines are skipped; line numbers are 1-based.
pub fn read_captions(path: impl AsRef<Path>) -> Result<Vec<CaptionRecord>> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|e| parse_error(path, line_no, e))?;
        let record = raw.validate().map_err(|e| parse_error(path, line_no, e))?;
        if !seen.insert(record.video_id.clone()) {
            return Err(Error::DuplicateVideoId {
                path: path.to_path_buf(),
                line: line_no,
                id: record.video_id,
            });
        }
        records.push(record);
    }
    Ok(records)
}

pub fn write_captions(path: impl AsRef<Path>, records: &[CaptionRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, &RawRecord::from(r)).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `video_id -> caption` in id order.
pub fn write_hypotheses(path: impl AsRef<Path>, captions: &BTreeMap<String, String>) -> Result<()> {
    let records: Vec<CaptionRecord> = captions
        .iter()
        .map(|(id, c)| CaptionRecord::hypothesis(id.clone(), c.clone()))
        .collect();
    write_captions(path, &records)
}

fn kind_error(path: &Path, id: &str, want: &str) -> Error {
    parse_error(path, 0, format!("record `{id}` is not a {want} record"))
}

/// Hypotheses keyed by video id; reference records are rejected.
pub fn hypotheses(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    read_captions(path)?
        .into_iter()
        .map(|r| match r.text {
            CaptionText::Hypothesis(c) => Ok((r.video_id, c)),
            CaptionText::References(_) => Err(kind_error(path, &r.video_id, "`caption`")),
        })
        .collect()
}

/// References keyed by video id. A single `caption` counts as a one-element
/// reference list.
pub fn references(path: impl AsRef<Path>) -> Result<BTreeMap<String, Vec<String>>> {
    Ok(read_captions(path)?
        .into_iter()
        .map(|r| match r.text {
            CaptionText::Hypothesis(c) => (r.video_id, vec![c]),
            CaptionText::References(cs) => (r.video_id, cs),
        })
        .collect())
}
