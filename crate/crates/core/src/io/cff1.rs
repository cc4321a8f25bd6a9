//! CFF1: `b"CFF1"`, `n_frames: u32 LE`, `dim: u32 LE`, then
//! `n_frames * dim` row-major `f32 LE` values. Nothing follows.

use std::path::Path;

use crate::features::{FeatureSequence, Matrix};
use crate::{Error, Result};

pub const CFF1_MAGIC: &[u8; 4] = b"CFF1";
const HEADER_LEN: usize = 12;

/// Frame rate assigned to sequences read from CFF1, which stores none.
pub const DEFAULT_FPS: f64 = 10.0;

pub fn encode_cff1(frames: &Matrix) -> Result<Vec<u8>> {
    let (rows, cols) = frames.shape();
    let too_big = |what: &str, n: usize| Error::InvalidArgument(format!("{what} {n} exceeds u32"));
    let n = u32::try_from(rows).map_err(|_| too_big("n_frames", rows))?;
    let d = u32::try_from(cols).map_err(|_| too_big("dim", cols))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * rows * cols);
    out.extend_from_slice(CFF1_MAGIC);
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&d.to_le_bytes());
    for (i, &v) in frames.as_slice().iter().enumerate() {
        let single = v as f32;
        if !single.is_finite() {
            return Err(Error::NonFiniteValue {
                row: i / cols,
                col: i % cols,
            });
        }
        out.extend_from_slice(&single.to_le_bytes());
    }
    Ok(out)
}

/// Parses CFF1 bytes; `path` only labels errors.
pub fn decode_cff1(bytes: &[u8], path: &Path) -> Result<Matrix> {
    let prefix = bytes.len().min(4);
    if bytes[..prefix] != CFF1_MAGIC[..prefix] {
        return Err(Error::BadMagic(path.to_path_buf()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedFile {
            path: path.to_path_buf(),
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as u64;
    let (rows, cols) = (word(4), word(8));
    let expected = HEADER_LEN as u64 + 4 * rows * cols;
    let found = bytes.len() as u64;
    if found < expected {
        return Err(Error::TruncatedFile {
            path: path.to_path_buf(),
            expected,
            found,
        });
    }
    if found > expected {
        return Err(super::parse_error(
            path,
            0,
            format!("{} trailing bytes after {expected}", found - expected),
        ));
    }
    let (rows, cols) = (rows as usize, cols as usize);
    let mut data = Vec::with_capacity(rows * cols);
    for (i, chunk) in bytes[HEADER_LEN..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::NonFiniteValue {
                row: i / cols,
                col: i % cols,
            });
        }
        data.push(v as f64);
    }
    Matrix::from_vec(rows, cols, data)
}

/// Reads a feature file. The sequence is named after the file stem.
pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureSequence> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let frames = decode_cff1(&bytes, path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    FeatureSequence::new(name, DEFAULT_FPS, frames)
}

pub fn write_features(path: impl AsRef<Path>, features: &FeatureSequence) -> Result<()> {
    std::fs::write(path, encode_cff1(features.frames())?)?;
    Ok(())
}
