//! File formats: JSON-lines caption and trace files, the CFF1 binary
//! feature format, and JSON checkpoints.
//!
//! Every reader validates what it builds and reports the offending line (or
//! byte count) instead of constructing an invalid value.

mod captions;
mod cff1;
mod checkpoint;
mod trace;

pub use captions::{
    hypotheses, read_captions, references, write_captions, write_hypotheses, CaptionRecord,
    CaptionText,
};
pub use cff1::{decode_cff1, encode_cff1, read_features, write_features, CFF1_MAGIC, DEFAULT_FPS};
pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_FORMAT};
pub use trace::{read_trace, write_trace, TraceFile, TraceRecord};

use std::path::Path;

use crate::Error;

pub(crate) fn parse_error(path: &Path, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.to_string(),
    }
}
