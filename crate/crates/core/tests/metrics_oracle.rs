mod common;

use capkit::metrics::{bleu4, cider_d, corpus_eval, lcs_len, rouge_l, CorpusIdf};
use capkit::{tokenize, Error, TokenSequence};
use common::*;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn check_fixture(hyps: &str, refs: &str, expected: &str) {
    let (h, r) = load_corpus(hyps, refs);
    let report = corpus_eval(&h, &r).unwrap();
    let frozen = load_expected(expected);
    let brute = oracle_report(&h, &r);

    let lib = [report.bleu4, report.rouge_l, report.cider_d];
    let bf = [brute.bleu4, brute.rouge_l, brute.cider_d];
    for m in 0..3 {
        assert!(
            close(lib[m], frozen.corpus[m], TOL),
            "corpus metric {m}: {} vs {}",
            lib[m],
            frozen.corpus[m]
        );
        assert!(
            close(lib[m], bf[m], TOL),
            "corpus metric {m}: {} vs brute {}",
            lib[m],
            bf[m]
        );
    }
    assert_eq!(report.per_video.len(), frozen.per_video.len());
    for (id, s) in &report.per_video {
        let got = [s.bleu4, s.rouge_l, s.cider_d];
        for (m, &g) in got.iter().enumerate() {
            assert!(
                close(g, frozen.per_video[id][m], TOL),
                "{id} metric {m}"
            );
            assert!(
                close(g, brute.per_video[id][m], TOL),
                "{id} metric {m} vs brute"
            );
        }
    }
}

#[test]
fn toy_corpus_matches_frozen_values() {
    check_fixture(
        "metrics/toy_hyps.jsonl",
        "metrics/toy_refs.jsonl",
        "metrics/toy_expected.json",
    );
}

#[test]
fn twenty_pair_corpus_matches_frozen_values() {
    check_fixture(
        "metrics/pairs20_hyps.jsonl",
        "metrics/pairs20_refs.jsonl",
        "metrics/pairs20_expected.json",
    );
}

#[test]
fn bleu_is_zero_without_four_gram_overlap() {
    let h = tokenize("the cat sat on the mat");
    let r = [tokenize("the cat is on the mat")];
    assert_eq!(bleu4(&h, &r).unwrap(), 0.0);
}

#[test]
fn rouge_on_swapped_tokens() {
    let h = tokenize("a b c d");
    let r = [tokenize("a c b d")];
    assert!(close(rouge_l(&h, &r).unwrap(), 0.75, 1e-12));
}

#[test]
fn lcs_classic_case() {
    let w = |s: &str| tokenize(s).tokens().to_vec();
    assert_eq!(lcs_len(&w("a b c b d a b"), &w("b d c a b a")), 4);
}

#[test]
fn missing_reference_is_reported_by_id() {
    let (h, mut r) = load_corpus("metrics/toy_hyps.jsonl", "metrics/toy_refs.jsonl");
    r.remove("v2");
    match corpus_eval(&h, &r) {
        Err(Error::MissingReference(id)) => assert_eq!(id, "v2"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn adding_identical_reference_never_lowers_bleu_or_rouge() {
    let (h, r) = load_corpus("metrics/pairs20_hyps.jsonl", "metrics/pairs20_refs.jsonl");
    for (id, hyp) in &h {
        let mut more = r[id].clone();
        let b0 = bleu4(hyp, &more).unwrap();
        let r0 = rouge_l(hyp, &more).unwrap();
        more.push(hyp.clone());
        assert!(bleu4(hyp, &more).unwrap() >= b0, "{id}");
        assert!(rouge_l(hyp, &more).unwrap() >= r0, "{id}");
    }
}

const WORDS: [&str; 8] = ["a", "man", "dog", "runs", "the", "park", "in", "red"];

fn sentence() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(WORDS.to_vec()), 1..=10)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn seq(words: &[String]) -> TokenSequence {
    tokenize(&words.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metrics_agree_with_brute_force(
        hyp in sentence(),
        refs in prop::collection::vec(sentence(), 1..=5),
        other in prop::collection::vec(prop::collection::vec(sentence(), 1..=3), 0..=3),
    ) {
        let h = seq(&hyp);
        let rs: Vec<TokenSequence> = refs.iter().map(|r| seq(r)).collect();
        let mut docs: Vec<Vec<TokenSequence>> = vec![rs.clone()];
        docs.extend(other.iter().map(|d| d.iter().map(|r| seq(r)).collect()));
        let idf = CorpusIdf::from_documents(docs.iter().map(Vec::as_slice)).unwrap();

        let bf_idf = Idf::new(docs.iter().map(|d| d.iter().map(|t| t.tokens().to_vec()).collect()).collect());
        let hw = h.tokens().to_vec();
        let rw: Vec<Vec<String>> = rs.iter().map(|t| t.tokens().to_vec()).collect();

        prop_assert!(close(bleu4(&h, &rs).unwrap(), bleu(&hw, &rw), TOL));
        prop_assert!(close(rouge_l(&h, &rs).unwrap(), rouge(&hw, &rw), TOL));
        prop_assert!(close(cider_d(&h, &rs, &idf).unwrap(), cider(&hw, &rw, &bf_idf), TOL));
    }
}
