//! JSON checkpoints holding the vocabulary and every weight. Floats are
//! written in shortest round-trip form, so reading back is exact.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parse_error;
use crate::captioner::{ToyParams, Vocab};
use crate::features::Matrix;
use crate::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "capkit-checkpoint/1";

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub vocab: Vocab,
    pub params: ToyParams,
    /// Training stage that produced the weights, e.g. `xe` or `scst`.
    pub stage: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    format: String,
    stage: String,
    vocab: Vec<String>,
    feature_dim: usize,
    w_prev: Matrix,
    w_vid: Matrix,
    w_sub: Matrix,
    b: Vec<f64>,
}

pub fn write_checkpoint(path: impl AsRef<Path>, ckpt: &Checkpoint) -> Result<()> {
    if ckpt.vocab.len() != ckpt.params.vocab_size() {
        return Err(Error::ShapeMismatch(format!(
            "vocabulary has {} entries, parameters expect {}",
            ckpt.vocab.len(),
            ckpt.params.vocab_size()
        )));
    }
    let doc = Doc {
        format: CHECKPOINT_FORMAT.into(),
        stage: ckpt.stage.clone(),
        vocab: ckpt.vocab.tokens().to_vec(),
        feature_dim: ckpt.params.feature_dim(),
        w_prev: ckpt.params.w_prev.clone(),
        w_vid: ckpt.params.w_vid.clone(),
        w_sub: ckpt.params.w_sub.clone(),
        b: ckpt.params.b.clone(),
    };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &doc).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let doc: Doc = serde_json::from_str(&text).map_err(|e| parse_error(path, e.line(), e))?;
    if doc.format != CHECKPOINT_FORMAT {
        return Err(parse_error(
            path,
            0,
            format!("unsupported format `{}`", doc.format),
        ));
    }
    let vocab = Vocab::from_tokens(doc.vocab).map_err(|e| parse_error(path, 0, e))?;
    // Deserialised matrices bypass the constructor, so re-check them.
    let rebuild = |m: Matrix| {
        let (r, c) = m.shape();
        Matrix::from_vec(r, c, m.as_slice().to_vec())
    };
    let params = ToyParams::new(
        rebuild(doc.w_prev)?,
        rebuild(doc.w_vid)?,
        rebuild(doc.w_sub)?,
        doc.b,
    )?;
    if params.vocab_size() != vocab.len() || params.feature_dim() != doc.feature_dim {
        return Err(Error::ShapeMismatch(format!(
            "checkpoint declares vocab {} and feature_dim {}, weights have {} and {}",
            vocab.len(),
            doc.feature_dim,
            params.vocab_size(),
            params.feature_dim()
        )));
    }
    Ok(Checkpoint {
        vocab,
        params,
        stage: doc.stage,
    })
}
