use super::step_model::{StepModel, VideoContext};
use crate::captioner::{TokenId, EOS};
use crate::{Error, Result};

/// Allowed deviation of a step distribution's total mass from 1.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-6;

fn validate(probs: &[f64], vocab_size: usize) -> Result<()> {
    if probs.len() != vocab_size {
        return Err(Error::InvalidDistribution(format!(
            "{} entries for a vocabulary of {vocab_size}",
            probs.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidDistribution(format!(
            "entry {p} is not a probability"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("mass sums to {total}")));
    }
    Ok(())
}

/// Greedy decoding over the averaged distributions of `models`.
///
/// Every model sees the same prefix. Exact ties go to the lowest token id.
/// Returns the caption without BOS/EOS, at most `max_len` tokens.
pub fn word_level_decode<M: StepModel + ?Sized>(
    models: &mut [Box<M>],
    video: &VideoContext,
    max_len: usize,
) -> Result<Vec<TokenId>> {
    let first = models
        .first()
        .ok_or_else(|| Error::InvalidArgument("no models to ensemble".into()))?;
    if max_len == 0 {
        return Err(Error::InvalidArgument("max_len must be >= 1".into()));
    }
    let vocab = first.vocab().clone();
    if models.iter().any(|m| *m.vocab() != vocab) {
        return Err(Error::VocabMismatch);
    }
    for m in models.iter_mut() {
        m.reset(video)?;
    }

    let scale = 1.0 / models.len() as f64;
    let mut prefix: Vec<TokenId> = Vec::new();
    while prefix.len() < max_len {
        let mut mean = vec![0.0; vocab.len()];
        for m in models.iter_mut() {
            let probs = m.step(&prefix)?;
            validate(&probs, vocab.len())?;
            for (acc, p) in mean.iter_mut().zip(&probs) {
                *acc += p;
            }
        }
        mean.iter_mut().for_each(|p| *p *= scale);
        let next = crate::captioner::argmax(&mean);
        if next == EOS {
            break;
        }
        prefix.push(next);
    }
    Ok(prefix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::captioner::Vocab;
    use crate::ensemble::ReplayModel;
    use crate::metrics::tokenize;
    use std::collections::BTreeMap;

    fn vocab() -> Vocab {
        Vocab::from_words(["x", "y"]).unwrap()
    }

    fn replay(steps: Vec<Vec<f64>>) -> Box<dyn StepModel> {
        let mut traces = BTreeMap::new();
        traces.insert("v".to_string(), steps);
        Box::new(ReplayModel::new(vocab(), traces).unwrap())
    }

    fn ctx() -> VideoContext {
        VideoContext {
            video_id: "v".into(),
            fused: None,
            subtitle: tokenize(""),
        }
    }

    #[test]
    fn tie_goes_to_lowest_id() {
        // 6-token vocabulary; ids 0..=2 carry the stated masses.
        let a = vec![0.6, 0.3, 0.1, 0.0, 0.0, 0.0];
        let b = vec![0.2, 0.5, 0.3, 0.0, 0.0, 0.0];
        let mut models = vec![replay(vec![a]), replay(vec![b])];
        // mean is [0.4, 0.4, 0.2]: PAD wins the tie, then the trace runs out
        // and replays EOS.
        let out = word_level_decode(&mut models, &ctx(), 2).unwrap();
        assert_eq!(out, vec![0]);
    }

    #[test]
    fn hand_averaged_two_steps() {
        // step 1: means x=0.55, y=0.45 -> x; step 2: EOS 0.6 -> stop.
        let m1 = vec![
            vec![0.0, 0.0, 0.0, 0.0, 0.9, 0.1],
            vec![0.0, 0.0, 0.3, 0.0, 0.2, 0.5],
        ];
        let m2 = vec![
            vec![0.0, 0.0, 0.0, 0.0, 0.2, 0.8],
            vec![0.0, 0.0, 0.9, 0.0, 0.1, 0.0],
        ];
        let mut models = vec![replay(m1), replay(m2)];
        assert_eq!(word_level_decode(&mut models, &ctx(), 5).unwrap(), vec![4]);
    }

    struct Fixed(Vocab, Vec<f64>);

    impl StepModel for Fixed {
        fn vocab(&self) -> &Vocab {
            &self.0
        }
        fn reset(&mut self, _: &VideoContext) -> Result<()> {
            Ok(())
        }
        fn step(&mut self, _: &[TokenId]) -> Result<Vec<f64>> {
            Ok(self.1.clone())
        }
    }

    #[test]
    fn invalid_distribution_rejected() {
        for probs in [
            vec![0.0, 0.0, 0.0, 0.0, 0.5, 0.3],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.5, 0.0, -0.5, 0.0],
        ] {
            let mut models: Vec<Box<dyn StepModel>> = vec![Box::new(Fixed(vocab(), probs))];
            assert!(matches!(
                word_level_decode(&mut models, &ctx(), 3),
                Err(Error::InvalidDistribution(_))
            ));
        }
    }

    #[test]
    fn empty_model_list() {
        let mut models: Vec<Box<dyn StepModel>> = Vec::new();
        assert!(word_level_decode(&mut models, &ctx(), 3).is_err());
    }

    #[test]
    fn vocab_mismatch() {
        let other = Vocab::from_words(["x", "z"]).unwrap();
        let mut traces = BTreeMap::new();
        traces.insert("v".to_string(), vec![vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]]);
        let mut models: Vec<Box<dyn StepModel>> = vec![
            replay(vec![vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]]),
            Box::new(ReplayModel::new(other, traces).unwrap()),
        ];
        assert!(matches!(
            word_level_decode(&mut models, &ctx(), 3),
            Err(Error::VocabMismatch)
        ));
    }
}
