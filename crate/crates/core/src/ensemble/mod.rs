//! Caption ensembling.
//!
//! Word level: greedy decoding over the arithmetic mean of every model's
//! next-token distribution. Sentence level: each candidate is scored by
//! CIDEr-D against the other candidates of the same video and the best one
//! wins. [`full_ensemble`] runs the word-level decode first and adds its
//! output to the sentence-level pool.

mod consensus;
mod pipeline;
mod replay;
mod step_model;
mod word_level;

pub use consensus::{build_pool_idf, sentence_consensus, CandidateSet, ConsensusResult};
pub use pipeline::full_ensemble;
pub use replay::ReplayModel;
pub use step_model::{StepModel, VideoContext};
pub use word_level::{word_level_decode, DISTRIBUTION_TOLERANCE};
