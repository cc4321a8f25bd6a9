//! Brute-force reference implementations used as test oracles. They share
//! nothing with the library beyond the tokenizer and favour obviousness
//! over speed: n-grams are counted by linear scans, LCS by memoised
//! recursion.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use capkit::{tokenize, TokenSequence};

pub fn words(s: &str) -> Vec<String> {
    tokenize(s).tokens().to_vec()
}

fn grams(t: &[String], n: usize) -> Vec<Vec<String>> {
    if t.len() < n {
        return Vec::new();
    }
    (0..=t.len() - n).map(|i| t[i..i + n].to_vec()).collect()
}

fn count(list: &[Vec<String>], g: &[String]) -> usize {
    list.iter().filter(|x| x.as_slice() == g).count()
}

fn distinct(list: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for g in list {
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    out
}

pub struct BleuCounts {
    pub matched: [usize; 4],
    pub total: [usize; 4],
    pub c: usize,
    pub r: usize,
}

pub fn bleu_counts(h: &[String], refs: &[Vec<String>]) -> BleuCounts {
    let mut out = BleuCounts {
        matched: [0; 4],
        total: [0; 4],
        c: h.len(),
        r: 0,
    };
    for n in 1..=4 {
        let hg = grams(h, n);
        out.total[n - 1] = hg.len();
        for g in distinct(&hg) {
            let max_ref = refs
                .iter()
                .map(|r| count(&grams(r, n), &g))
                .max()
                .unwrap_or(0);
            out.matched[n - 1] += count(&hg, &g).min(max_ref);
        }
    }
    let mut best = refs[0].len();
    for r in refs {
        let (d, bd) = (r.len().abs_diff(h.len()), best.abs_diff(h.len()));
        if d < bd || (d == bd && r.len() < best) {
            best = r.len();
        }
    }
    out.r = best;
    out
}

pub fn bleu_from(m: &[usize; 4], t: &[usize; 4], c: usize, r: usize) -> f64 {
    if c == 0 || (0..4).any(|i| m[i] == 0 || t[i] == 0) {
        return 0.0;
    }
    let mut prod = 1.0;
    for i in 0..4 {
        prod *= m[i] as f64 / t[i] as f64;
    }
    let bp = if c >= r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };
    bp * prod.powf(0.25)
}

pub fn bleu(h: &[String], refs: &[Vec<String>]) -> f64 {
    let b = bleu_counts(h, refs);
    bleu_from(&b.matched, &b.total, b.c, b.r)
}

pub fn corpus_bleu(pairs: &[(Vec<String>, Vec<Vec<String>>)]) -> f64 {
    let (mut m, mut t, mut c, mut r) = ([0; 4], [0; 4], 0, 0);
    for (h, refs) in pairs {
        let b = bleu_counts(h, refs);
        for i in 0..4 {
            m[i] += b.matched[i];
            t[i] += b.total[i];
        }
        c += b.c;
        r += b.r;
    }
    bleu_from(&m, &t, c, r)
}

fn lcs_rec(
    a: &[String],
    b: &[String],
    i: usize,
    j: usize,
    memo: &mut Vec<Vec<Option<usize>>>,
) -> usize {
    if i == a.len() || j == b.len() {
        return 0;
    }
    if let Some(v) = memo[i][j] {
        return v;
    }
    let v = if a[i] == b[j] {
        1 + lcs_rec(a, b, i + 1, j + 1, memo)
    } else {
        lcs_rec(a, b, i + 1, j, memo).max(lcs_rec(a, b, i, j + 1, memo))
    };
    memo[i][j] = Some(v);
    v
}

pub fn lcs(a: &[String], b: &[String]) -> usize {
    let mut memo = vec![vec![None; b.len() + 1]; a.len() + 1];
    lcs_rec(a, b, 0, 0, &mut memo)
}

pub fn rouge(h: &[String], refs: &[Vec<String>]) -> f64 {
    let mut best = 0.0f64;
    for r in refs {
        let l = lcs(h, r) as f64;
        if l == 0.0 {
            continue;
        }
        let p = l / h.len() as f64;
        let rc = l / r.len() as f64;
        let f = (1.0 + 1.44) * p * rc / (rc + 1.44 * p);
        best = best.max(f);
    }
    best
}

/// Documents are lists of captions; idf = ln(N / df), unseen n-grams 0.
pub struct Idf {
    pub n_docs: usize,
    pub docs: Vec<Vec<Vec<String>>>,
}

impl Idf {
    pub fn new(docs: Vec<Vec<Vec<String>>>) -> Self {
        Idf {
            n_docs: docs.len(),
            docs,
        }
    }

    pub fn df(&self, g: &[String]) -> usize {
        self.docs
            .iter()
            .filter(|caps| {
                caps.iter()
                    .any(|c| grams(c, g.len()).iter().any(|x| x.as_slice() == g))
            })
            .count()
    }

    pub fn idf(&self, g: &[String]) -> f64 {
        match self.df(g) {
            0 => 0.0,
            df => (self.n_docs as f64 / df as f64).ln(),
        }
    }
}

pub fn cider(h: &[String], refs: &[Vec<String>], idf: &Idf) -> f64 {
    let mut total = 0.0;
    for n in 1..=4 {
        let hg = grams(h, n);
        let hd = distinct(&hg);
        let hw: Vec<f64> = hd
            .iter()
            .map(|g| count(&hg, g) as f64 * idf.idf(g))
            .collect();
        let hn = hw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut acc = 0.0;
        for r in refs {
            let rg = grams(r, n);
            let rd = distinct(&rg);
            let rn = rd
                .iter()
                .map(|g| (count(&rg, g) as f64 * idf.idf(g)).powi(2))
                .sum::<f64>()
                .sqrt();
            if hn == 0.0 || rn == 0.0 {
                continue;
            }
            let mut dot = 0.0;
            for (g, w) in hd.iter().zip(&hw) {
                let rc = count(&rg, g);
                if rc > 0 {
                    let rw = rc as f64 * idf.idf(g);
                    dot += w.min(rw) * rw;
                }
            }
            let delta = h.len() as f64 - r.len() as f64;
            acc += dot / (hn * rn) * (-delta * delta / 72.0).exp();
        }
        total += acc / refs.len() as f64;
    }
    10.0 * total / 4.0
}

/// Leave-one-out CIDEr-D scores and the winner (first maximum).
pub fn consensus(cands: &[Vec<String>], idf: &Idf) -> (usize, Vec<f64>) {
    if cands.len() == 1 {
        return (0, vec![0.0]);
    }
    let scores: Vec<f64> = (0..cands.len())
        .map(|i| {
            let rest: Vec<Vec<String>> = cands
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| c.clone())
                .collect();
            cider(&cands[i], &rest, idf)
        })
        .collect();
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    (best, scores)
}

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

pub type Hyps = BTreeMap<String, TokenSequence>;
pub type Refs = BTreeMap<String, Vec<TokenSequence>>;

/// Loads a hypothesis/reference fixture pair through the library readers.
pub fn load_corpus(hyp: &str, refs: &str) -> (Hyps, Refs) {
    let h = capkit::io::hypotheses(fixture(hyp)).unwrap();
    let r = capkit::io::references(fixture(refs)).unwrap();
    (
        h.into_iter().map(|(k, v)| (k, tokenize(&v))).collect(),
        r.into_iter()
            .map(|(k, v)| (k, v.iter().map(|s| tokenize(s)).collect()))
            .collect(),
    )
}

pub struct OracleReport {
    pub bleu4: f64,
    pub rouge_l: f64,
    pub cider_d: f64,
    pub per_video: BTreeMap<String, [f64; 3]>,
}

/// Brute-force corpus scoring with IDF taken from every reference set.
pub fn oracle_report(hyps: &Hyps, refs: &Refs) -> OracleReport {
    let as_words = |t: &TokenSequence| t.tokens().to_vec();
    let idf = Idf::new(
        refs.values()
            .map(|rs| rs.iter().map(as_words).collect())
            .collect(),
    );
    let mut pairs = Vec::new();
    let mut per_video = BTreeMap::new();
    for (id, h) in hyps {
        let h = as_words(h);
        let rs: Vec<Vec<String>> = refs[id].iter().map(as_words).collect();
        per_video.insert(
            id.clone(),
            [bleu(&h, &rs), rouge(&h, &rs), cider(&h, &rs, &idf)],
        );
        pairs.push((h, rs));
    }
    let n = per_video.len() as f64;
    OracleReport {
        bleu4: corpus_bleu(&pairs),
        rouge_l: per_video.values().map(|v| v[1]).sum::<f64>() / n,
        cider_d: per_video.values().map(|v| v[2]).sum::<f64>() / n,
        per_video,
    }
}

/// Frozen scores produced by an external reference implementation.
pub struct Expected {
    pub corpus: [f64; 3],
    pub per_video: BTreeMap<String, [f64; 3]>,
}

pub fn load_expected(rel: &str) -> Expected {
    let text = std::fs::read_to_string(fixture(rel)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let triple = |o: &serde_json::Value| {
        [
            o["bleu4"].as_f64().unwrap(),
            o["rouge_l"].as_f64().unwrap(),
            o["cider_d"].as_f64().unwrap(),
        ]
    };
    Expected {
        corpus: triple(&v["corpus"]),
        per_video: v["per_video"]
            .as_object()
            .unwrap()
            .iter()
            .map(|(k, o)| (k.clone(), triple(o)))
            .collect(),
    }
}

/// Corpus CIDEr-D and exact-match count of greedy decodes on the
/// synthetic task.
pub fn synthetic_greedy_scores(
    params: &capkit::captioner::ToyParams,
    task: &capkit::captioner::synthetic::SyntheticTask,
    examples: &[capkit::captioner::TrainExample],
    max_len: usize,
) -> (f64, usize) {
    let mut hyps = BTreeMap::new();
    let mut exact = 0;
    for (ex, video) in examples.iter().zip(&task.videos) {
        let ids = capkit::captioner::greedy_decode(params, &ex.cond, max_len).unwrap();
        let caption = task.vocab.decode(&ids);
        if caption == video.caption {
            exact += 1;
        }
        hyps.insert(ex.video_id.clone(), tokenize(&caption));
    }
    let report = capkit::metrics::corpus_eval(&hyps, &task.references()).unwrap();
    (report.cider_d, exact)
}
