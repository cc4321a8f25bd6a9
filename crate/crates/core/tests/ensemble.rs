mod common;

use std::collections::BTreeMap;

use capkit::captioner::{
    forward_step, greedy_decode, synthetic, Conditioning, ToyParams, ToyStepModel, Vocab, BOS, EOS,
};
use capkit::ensemble::{
    build_pool_idf, full_ensemble, sentence_consensus, word_level_decode, CandidateSet,
    ReplayModel, StepModel, VideoContext,
};
use capkit::features::Matrix;
use capkit::rng::SplitMix64;
use capkit::{tokenize, Error};
use common::{consensus, words, Idf};

fn random_features(rng: &mut SplitMix64, rows: usize, dim: usize) -> Matrix {
    let data = (0..rows * dim)
        .map(|_| 2.0 * rng.next_f64() - 1.0)
        .collect();
    Matrix::from_vec(rows, dim, data).unwrap()
}

fn videos(dim: usize, seed: u64) -> BTreeMap<String, VideoContext> {
    let mut rng = SplitMix64::new(seed);
    let subs = ["so red", "look", "so"];
    (0..3)
        .map(|i| {
            let id = format!("clip{i}");
            let ctx = VideoContext {
                video_id: id.clone(),
                fused: Some(random_features(&mut rng, 4, dim)),
                subtitle: tokenize(subs[i]),
            };
            (id, ctx)
        })
        .collect()
}

/// Word-level decode written out by hand from `forward_step`.
fn brute_word_level(
    models: &[ToyParams],
    ctx: &VideoContext,
    max_len: usize,
    vocab: &Vocab,
) -> Vec<usize> {
    let cond = Conditioning::from_video(vocab, ctx.fused.as_ref().unwrap(), &ctx.subtitle);
    let mut out = Vec::new();
    let mut prev = BOS;
    while out.len() < max_len {
        let mut mean = vec![0.0; vocab.len()];
        for p in models {
            let probs = forward_step(p, prev, &cond.v_mean, &cond.sub_bow).unwrap();
            for (m, q) in mean.iter_mut().zip(probs) {
                *m += q / models.len() as f64;
            }
        }
        let mut best = 0;
        for j in 0..mean.len() {
            if mean[j] > mean[best] {
                best = j;
            }
        }
        if best == EOS {
            break;
        }
        out.push(best);
        prev = best;
    }
    out
}

fn boxed(params: &[ToyParams], vocab: &Vocab) -> Vec<Box<dyn StepModel>> {
    params
        .iter()
        .map(|p| {
            Box::new(ToyStepModel::new(p.clone(), vocab.clone()).unwrap()) as Box<dyn StepModel>
        })
        .collect()
}

fn single_outputs() -> Vec<BTreeMap<String, String>> {
    let rows = [
        [
            "a dog is running",
            "a red cat is sitting",
            "a man is eating",
        ],
        ["a dog is running fast", "a cat is sitting", "a man eats"],
        [
            "the dog runs",
            "a red cat is sitting down",
            "a woman is eating",
        ],
    ];
    rows.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(i, c)| (format!("clip{i}"), c.to_string()))
                .collect()
        })
        .collect()
}

#[test]
fn three_models_three_videos_match_brute_force() {
    let vocab = synthetic::vocabulary();
    let dim = 6;
    let params: Vec<ToyParams> = (0..3)
        .map(|s| ToyParams::random(vocab.len(), dim, 1.5, 40 + s))
        .collect();
    let ctxs = videos(dim, 7);
    let singles = single_outputs();
    let max_len = 8;

    let mut models = boxed(&params, &vocab);
    let got = full_ensemble(&mut models, &singles, &ctxs, max_len).unwrap();

    let mut pools: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    for (id, ctx) in &ctxs {
        let mut cands: Vec<String> = singles.iter().map(|s| s[id].clone()).collect();
        cands.push(vocab.decode(&brute_word_level(&params, ctx, max_len, &vocab)));
        pools.insert(id.clone(), cands.iter().map(|c| words(c)).collect());
    }
    let idf = Idf::new(pools.values().cloned().collect());
    for (id, cands) in &pools {
        let (best, _) = consensus(cands, &idf);
        assert_eq!(words(&got[id]), cands[best], "{id}");
    }
}

#[test]
fn consensus_is_invariant_to_input_order_without_ties() {
    let singles = single_outputs();
    let videos = BTreeMap::new();
    let mut none: Vec<Box<dyn StepModel>> = Vec::new();
    let forward = full_ensemble(&mut none, &singles, &videos, 8).unwrap();
    let mut reversed = singles.clone();
    reversed.reverse();
    let backward = full_ensemble(&mut none, &reversed, &videos, 8).unwrap();
    assert_eq!(forward, backward);
}

#[test]
fn single_input_is_returned_unchanged() {
    let singles = vec![single_outputs().remove(0)];
    let mut none: Vec<Box<dyn StepModel>> = Vec::new();
    let out = full_ensemble(&mut none, &singles, &BTreeMap::new(), 8).unwrap();
    assert_eq!(out, singles[0]);
}

#[test]
fn disjoint_extra_candidate_never_wins_against_agreeing_majority() {
    let sets = vec![
        CandidateSet::new(
            "a",
            vec![
                "a dog runs".into(),
                "a dog runs".into(),
                "bird sleeping".into(),
            ],
        )
        .unwrap(),
        CandidateSet::new(
            "b",
            vec![
                "a cat sits".into(),
                "a cat sits".into(),
                "horse swimming".into(),
            ],
        )
        .unwrap(),
    ];
    let idf = build_pool_idf(&sets).unwrap();
    for s in &sets {
        let r = sentence_consensus(s, &idf).unwrap();
        assert_eq!(r.winner_index, 0);
        assert_eq!(r.scores[2], 0.0);
    }
}

#[test]
fn identical_models_reduce_to_greedy() {
    let vocab = synthetic::vocabulary();
    let p = ToyParams::random(vocab.len(), 5, 2.0, 99);
    for (_, ctx) in videos(5, 3) {
        let mut models = boxed(&[p.clone(), p.clone(), p.clone()], &vocab);
        let ens = word_level_decode(&mut models, &ctx, 10).unwrap();
        let cond = Conditioning::from_video(&vocab, ctx.fused.as_ref().unwrap(), &ctx.subtitle);
        assert_eq!(ens, greedy_decode(&p, &cond, 10).unwrap());
    }
}

#[test]
fn mismatched_ids_are_rejected() {
    let mut singles = single_outputs();
    singles[1].remove("clip2");
    singles[1].insert("clip9".into(), "a dog".into());
    let mut none: Vec<Box<dyn StepModel>> = Vec::new();
    match full_ensemble(&mut none, &singles, &BTreeMap::new(), 8) {
        Err(Error::VideoIdMismatch(msg)) => {
            assert!(msg.contains("clip9") && msg.contains("clip2"), "{msg}")
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn replay_and_toy_models_mix() {
    let vocab = synthetic::vocabulary();
    let p = ToyParams::random(vocab.len(), 4, 1.0, 5);
    let ctxs = videos(4, 11);
    let mut traces = BTreeMap::new();
    for (id, ctx) in &ctxs {
        let cond = Conditioning::from_video(&vocab, ctx.fused.as_ref().unwrap(), &ctx.subtitle);
        let (_, steps) = capkit::captioner::greedy_decode_traced(&p, &cond, 6).unwrap();
        traces.insert(id.clone(), steps);
    }
    let replay = ReplayModel::new(vocab.clone(), traces).unwrap();
    let mut models: Vec<Box<dyn StepModel>> = vec![
        Box::new(replay),
        Box::new(ToyStepModel::new(p.clone(), vocab.clone()).unwrap()),
    ];
    for ctx in ctxs.values() {
        let cond = Conditioning::from_video(&vocab, ctx.fused.as_ref().unwrap(), &ctx.subtitle);
        let ens = word_level_decode(&mut models, ctx, 6).unwrap();
        assert_eq!(ens, greedy_decode(&p, &cond, 6).unwrap());
    }
}

#[test]
fn vocab_mismatch_is_rejected() {
    let a = synthetic::vocabulary();
    let b = Vocab::from_words(["x", "y"]).unwrap();
    let ctx = videos(3, 1).remove("clip0").unwrap();
    let mut models: Vec<Box<dyn StepModel>> = vec![
        Box::new(ToyStepModel::new(ToyParams::zeros(a.len(), 3), a).unwrap()),
        Box::new(ToyStepModel::new(ToyParams::zeros(b.len(), 3), b).unwrap()),
    ];
    assert!(matches!(
        word_level_decode(&mut models, &ctx, 4),
        Err(Error::VocabMismatch)
    ));
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    const POOL_WORDS: [&str; 7] = ["a", "dog", "cat", "runs", "sits", "red", "the"];
    const FRESH_WORDS: [&str; 3] = ["zebra", "violin", "quartz"];

    fn caption(words: &'static [&'static str]) -> impl Strategy<Value = String> {
        prop::collection::vec(prop::sample::select(words), 1..=6).prop_map(|w| w.join(" "))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn model_order_does_not_matter(seeds in prop::collection::vec(0u64..1000, 2..=4), video in 0u64..50) {
            let vocab = synthetic::vocabulary();
            let params: Vec<ToyParams> = seeds.iter().map(|&s| ToyParams::random(vocab.len(), 4, 2.0, s)).collect();
            let ctx = videos(4, video).remove("clip1").unwrap();
            let forward = word_level_decode(&mut boxed(&params, &vocab), &ctx, 10).unwrap();
            let mut rev = params.clone();
            rev.reverse();
            let backward = word_level_decode(&mut boxed(&rev, &vocab), &ctx, 10).unwrap();
            // Continuous random weights make exact probability ties vanishingly rare.
            prop_assert_eq!(forward, backward);
        }

        #[test]
        fn appending_a_disjoint_candidate_keeps_the_winner(
            target in prop::collection::vec(caption(&POOL_WORDS), 2..=5),
            others in prop::collection::vec(prop::collection::vec(caption(&POOL_WORDS), 1..=4), 1..=3),
            fresh in caption(&FRESH_WORDS),
        ) {
            let build = |cands: Vec<String>| {
                let mut sets = vec![CandidateSet::new("t", cands).unwrap()];
                for (i, o) in others.iter().enumerate() {
                    sets.push(CandidateSet::new(format!("o{i}"), o.clone()).unwrap());
                }
                sets
            };
            let before = build(target.clone());
            let idf = build_pool_idf(&before).unwrap();
            let r0 = sentence_consensus(&before[0], &idf).unwrap();

            let mut extended = target.clone();
            extended.push(fresh);
            let after = build(extended);
            let idf = build_pool_idf(&after).unwrap();
            let r1 = sentence_consensus(&after[0], &idf).unwrap();

            prop_assert_eq!(r1.scores.len(), target.len() + 1);
            prop_assert_eq!(*r1.scores.last().unwrap(), 0.0);
            let best = r1.scores.iter().cloned().fold(f64::MIN, f64::max);
            prop_assert!(r1.scores[r0.winner_index] >= best - 1e-12);
            prop_assert!(r1.scores.iter().all(|s| (0.0..=10.0 + 1e-9).contains(s)));
        }
    }
}
