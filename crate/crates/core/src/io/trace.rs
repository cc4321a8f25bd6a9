//! Trace files: a `{"vocab": [...]}` header line followed by one
//! `{"video_id": "...", "steps": [[p_0, ..., p_V-1], ...]}` line per video.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parse_error;
use crate::captioner::Vocab;
use crate::ensemble::{ReplayModel, DISTRIBUTION_TOLERANCE};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub video_id: String,
    pub steps: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    vocab: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceFile {
    pub vocab: Vocab,
    pub records: Vec<TraceRecord>,
}

impl TraceFile {
    pub fn into_replay_model(self) -> Result<ReplayModel> {
        let traces: BTreeMap<String, Vec<Vec<f64>>> = self
            .records
            .into_iter()
            .map(|r| (r.video_id, r.steps))
            .collect();
        ReplayModel::new(self.vocab, traces)
    }
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<TraceFile> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "missing vocabulary header"))?;
    let header: Header =
        serde_json::from_str(&header?).map_err(|e| parse_error(path, line_no, e))?;
    let vocab = Vocab::from_tokens(header.vocab).map_err(|e| parse_error(path, line_no, e))?;

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (line_no, line) in lines {
        let record: TraceRecord =
            serde_json::from_str(&line?).map_err(|e| parse_error(path, line_no, e))?;
        if record.video_id.is_empty() {
            return Err(parse_error(path, line_no, "empty video_id"));
        }
        if !seen.insert(record.video_id.clone()) {
            return Err(Error::DuplicateVideoId {
                path: path.to_path_buf(),
                line: line_no,
                id: record.video_id,
            });
        }
        for (t, probs) in record.steps.iter().enumerate() {
            if probs.len() != vocab.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{}:{line_no}: step {t} has {} entries, vocabulary has {}",
                    path.display(),
                    probs.len(),
                    vocab.len()
                )));
            }
            if probs.iter().any(|p| *p < 0.0) {
                return Err(parse_error(
                    path,
                    line_no,
                    format!("step {t} has a negative entry"),
                ));
            }
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE {
                return Err(Error::DistributionNotNormalized {
                    path: path.to_path_buf(),
                    line: line_no,
                    sum,
                });
            }
        }
        records.push(record);
    }
    Ok(TraceFile { vocab, records })
}

pub fn write_trace(path: impl AsRef<Path>, trace: &TraceFile) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let header = Header {
        vocab: trace.vocab.tokens().to_vec(),
    };
    serde_json::to_writer(&mut out, &header).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    for r in &trace.records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
