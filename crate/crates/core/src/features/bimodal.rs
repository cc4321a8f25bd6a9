use super::matrix::Matrix;
use crate::metrics::{tokenize, TokenSequence};
use crate::{Error, Result};

pub const VIDEO_TYPE_ID: u8 = 0;
pub const TEXT_TYPE_ID: u8 = 1;

/// Fused video rows followed by subtitle tokens, with a type id per position.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenTypedSequence {
    pub video_part: Matrix,
    pub subtitle_tokens: TokenSequence,
    pub type_ids: Vec<u8>,
}

pub fn assemble_bimodal(fused: Matrix, subtitle: &str) -> Result<TokenTypedSequence> {
    if fused.rows() == 0 {
        return Err(Error::ShapeMismatch("fused matrix has no rows".into()));
    }
    let subtitle_tokens = tokenize(subtitle);
    let type_ids = std::iter::repeat_n(VIDEO_TYPE_ID, fused.rows())
        .chain(std::iter::repeat_n(TEXT_TYPE_ID, subtitle_tokens.len()))
        .collect();
    Ok(TokenTypedSequence {
        video_part: fused,
        subtitle_tokens,
        type_ids,
    })
}
