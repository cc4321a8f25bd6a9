//! Caption-generation tooling: BLEU-4 / ROUGE-L / CIDEr-D metrics, word- and
//! sentence-level caption ensembling, TSN frame sampling with multi-extractor
//! feature fusion, and a log-linear toy captioner trained with cross-entropy
//! followed by self-critical sequence training.

pub mod captioner;
pub mod ensemble;
pub mod error;
pub mod features;
pub mod io;
pub mod metrics;
pub mod rng;

pub use error::{Error, Result};
pub use metrics::{tokenize, TokenSequence};
