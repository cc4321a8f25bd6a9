use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use capkit::captioner::synthetic::{generate, SyntheticSpec};
use capkit::captioner::{
    greedy_decode, greedy_decode_traced, scst_train, xe_train, Conditioning, ScstConfig, ToyParams,
    ToyStepModel, TrainConfig, TrainExample, Vocab,
};
use capkit::ensemble::{full_ensemble, StepModel, VideoContext};
use capkit::features::{
    align_and_fuse, sliding_windows, tsn_test_indices, tsn_train_indices, Matrix, SamplingMode,
    TsnConfig,
};
use capkit::io::{
    encode_cff1, hypotheses, read_checkpoint, read_features, read_trace, references,
    write_checkpoint, write_hypotheses, write_trace, Checkpoint, TraceFile, TraceRecord,
};
use capkit::metrics::{corpus_eval, CorpusIdf, TokenSequence};
use capkit::tokenize;

use crate::data::{write_synthetic, DataDir};
use crate::error::{CliError, CliResult};
use crate::report::{ReportBuilder, RunReport};
use crate::{
    DecodeArgs, EnsembleArgs, EvalArgs, FuseArgs, Mode, SampleArgs, Stage, SynthArgs, TrainArgs,
    WindowsArgs,
};

fn print_report(report: &RunReport) -> CliResult<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

fn eprint_report(report: &RunReport) -> CliResult<()> {
    eprintln!("{}", serde_json::to_string_pretty(report)?);
    Ok(())
}

fn id_diff<'a>(
    a: impl Iterator<Item = &'a String>,
    b: impl Iterator<Item = &'a String>,
) -> Vec<&'a str> {
    let a: BTreeSet<&String> = a.collect();
    let b: BTreeSet<&String> = b.collect();
    a.symmetric_difference(&b).map(|s| s.as_str()).collect()
}

pub fn eval(args: EvalArgs) -> CliResult<()> {
    let report = ReportBuilder::start("eval");
    let hyps = hypotheses(&args.hyp)?;
    let refs = references(&args.refs)?;
    if let Some(id) = hyps.keys().find(|id| !refs.contains_key(*id)) {
        return Err(CliError::Core(capkit::Error::MissingReference(id.clone())));
    }
    let extra = id_diff(hyps.keys(), refs.keys());
    if !extra.is_empty() {
        return Err(CliError::IdMismatch(format!(
            "no hypothesis for {}",
            extra.join(", ")
        )));
    }
    let hyp_tokens: BTreeMap<String, TokenSequence> =
        hyps.iter().map(|(k, v)| (k.clone(), tokenize(v))).collect();
    let ref_tokens: BTreeMap<String, Vec<TokenSequence>> = refs
        .iter()
        .map(|(k, v)| (k.clone(), v.iter().map(|c| tokenize(c)).collect()))
        .collect();
    let scores = corpus_eval(&hyp_tokens, &ref_tokens)?;

    let keys: Vec<&str> = args.metrics.iter().map(|m| m.key()).collect();
    let select = |v: Value| -> Value {
        let obj = v.as_object().cloned().unwrap_or_default();
        Value::Object(
            obj.into_iter()
                .filter(|(k, _)| keys.contains(&k.as_str()))
                .collect(),
        )
    };
    let full = serde_json::to_value(&scores)?;
    let corpus = select(full.clone());
    let per_video: serde_json::Map<String, Value> = full["per_video"]
        .as_object()
        .cloned()
        .unwrap_or_default()
        .into_iter()
        .map(|(id, s)| (id, select(s)))
        .collect();
    for m in &keys {
        eprintln!("{m}: {}", corpus[m]);
    }
    let config = json!({"hyp": args.hyp, "refs": args.refs, "metrics": keys});
    let outputs = json!({"corpus": corpus, "per_video": per_video});
    print_report(&report.finish(config, vec![], outputs)?)
}

type Models = Vec<Box<dyn StepModel>>;

fn load_models(args: &EnsembleArgs) -> CliResult<(Models, BTreeMap<String, VideoContext>)> {
    let mut models: Vec<Box<dyn StepModel>> = Vec::new();
    let mut contexts = BTreeMap::new();
    if let Some(dir) = &args.data {
        let data = DataDir::load(dir)?;
        for (i, v) in data.videos.iter().enumerate() {
            let ctx = VideoContext {
                video_id: v.video_id.clone(),
                fused: Some(v.fused(i, args.k, SamplingMode::Test, 0)?),
                subtitle: v.subtitle.clone(),
            };
            contexts.insert(v.video_id.clone(), ctx);
        }
    }
    for path in &args.checkpoints {
        let ckpt = read_checkpoint(path)?;
        models.push(Box::new(ToyStepModel::new(ckpt.params, ckpt.vocab)?));
    }
    for path in &args.traces {
        models.push(Box::new(read_trace(path)?.into_replay_model()?));
    }
    Ok((models, contexts))
}

pub fn ensemble(args: EnsembleArgs) -> CliResult<()> {
    let report = ReportBuilder::start("ensemble");
    let singles = args
        .inputs
        .iter()
        .map(hypotheses)
        .collect::<Result<Vec<_>, _>>()?;
    let (mut models, mut contexts) = load_models(&args)?;
    if !args.traces.is_empty() && contexts.is_empty() {
        // Replayed models only need the video id.
        for id in singles[0].keys() {
            let ctx = VideoContext {
                video_id: id.clone(),
                fused: None,
                subtitle: tokenize(""),
            };
            contexts.insert(id.clone(), ctx);
        }
    }
    let winners = full_ensemble(&mut models, &singles, &contexts, args.max_len)?;
    write_hypotheses(&args.out, &winners)?;
    eprintln!("wrote {} captions to {}", winners.len(), args.out.display());
    let config = json!({
        "inputs": args.inputs,
        "checkpoints": args.checkpoints,
        "traces": args.traces,
        "data": args.data,
        "k": args.k,
        "max_len": args.max_len,
        "out": args.out,
    });
    print_report(&report.finish(config, vec![], json!({ "captions": winners }))?)
}

fn indices(n: usize, k: usize, mode: Mode, seed: Option<u64>) -> CliResult<Vec<usize>> {
    Ok(match mode {
        Mode::Test => tsn_test_indices(n, k)?,
        Mode::Train => {
            let seed =
                seed.ok_or_else(|| CliError::BadArgs("--seed is required in train mode".into()))?;
            tsn_train_indices(n, &TsnConfig::new(k, seed)?)?
        }
    })
}

/// Indices go to standard output as one line; the report goes to standard
/// error so the output stays pipeable.
pub fn sample(args: SampleArgs) -> CliResult<()> {
    let report = ReportBuilder::start("sample");
    if args.n == 0 {
        return Err(CliError::BadArgs("--n must be at least 1".into()));
    }
    let idx = indices(args.n, args.k, args.mode, args.seed)?;
    let line: Vec<String> = idx.iter().map(usize::to_string).collect();
    println!("{}", line.join(" "));
    let config = json!({"n": args.n, "k": args.k, "mode": args.mode.name()});
    eprint_report(&report.finish(
        config,
        args.seed.into_iter().collect(),
        json!({ "indices": idx }),
    )?)
}

pub fn fuse(args: FuseArgs) -> CliResult<()> {
    let report = ReportBuilder::start("fuse");
    if args.mode == Mode::Train && args.seed.is_none() {
        return Err(CliError::BadArgs("--seed is required in train mode".into()));
    }
    let feats = args
        .features
        .iter()
        .map(read_features)
        .collect::<Result<Vec<_>, _>>()?;
    let fused = align_and_fuse(&feats, args.k, args.mode.into(), args.seed.unwrap_or(0))?;
    std::fs::write(&args.out, encode_cff1(&fused)?)?;
    eprintln!(
        "wrote {}x{} features to {}",
        fused.rows(),
        fused.cols(),
        args.out.display()
    );
    let config = json!({
        "features": args.features,
        "k": args.k,
        "mode": args.mode.name(),
        "out": args.out,
    });
    let outputs = json!({
        "rows": fused.rows(),
        "dim": fused.cols(),
        "input_dims": feats.iter().map(|f| f.dim()).collect::<Vec<_>>(),
    });
    print_report(&report.finish(config, args.seed.into_iter().collect(), outputs)?)
}

/// Rounds away representation noise such as `0.8999999999999999`.
fn tidy(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// One `start end` line per clip on standard output; report on standard
/// error.
pub fn windows(args: WindowsArgs) -> CliResult<()> {
    let report = ReportBuilder::start("windows");
    let schedule = sliding_windows(args.duration, args.window, args.stride)?;
    for c in &schedule.clips {
        println!("{} {}", tidy(c.start_s), tidy(c.end_s));
    }
    let config = json!({"duration": args.duration, "window": args.window, "stride": args.stride});
    eprint_report(&report.finish(config, vec![], json!({ "clips": schedule.clips.len() }))?)
}

pub fn synth(args: SynthArgs) -> CliResult<()> {
    let report = ReportBuilder::start("synth");
    if args.chases > args.videos {
        return Err(CliError::BadArgs("--chases cannot exceed --videos".into()));
    }
    let spec = SyntheticSpec {
        videos: args.videos,
        chases: args.chases,
        seed: args.seed,
    };
    let task = generate(&spec);
    write_synthetic(&task, &args.out)?;
    eprintln!(
        "wrote {} videos to {}",
        task.videos.len(),
        args.out.display()
    );
    let config = json!({"out": args.out, "videos": args.videos, "chases": args.chases});
    let outputs = json!({"videos": task.videos.len(), "vocab": task.vocab.tokens()});
    print_report(&report.finish(config, vec![args.seed], outputs)?)
}

/// Reserved tokens then every reference word in first-seen order, walking
/// videos by id.
fn vocab_from_refs(refs: &BTreeMap<String, Vec<TokenSequence>>) -> CliResult<Vocab> {
    Ok(Vocab::from_words(
        refs.values().flatten().flat_map(|r| r.iter()),
    )?)
}

fn training_examples(
    data: &DataDir,
    refs: &BTreeMap<String, Vec<TokenSequence>>,
    vocab: &Vocab,
    k: usize,
) -> CliResult<Vec<TrainExample>> {
    data.videos
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let fused = v.fused(i, k, SamplingMode::Test, 0)?;
            Ok(TrainExample::new(
                vocab,
                v.video_id.clone(),
                &fused,
                &v.subtitle,
                refs[&v.video_id].clone(),
            ))
        })
        .collect()
}

/// Corpus CIDEr-D of greedy decodes and the number of videos whose decode
/// equals one of the references.
fn greedy_quality(
    params: &ToyParams,
    vocab: &Vocab,
    data: &[TrainExample],
    max_len: usize,
) -> CliResult<(f64, usize)> {
    let mut hyps = BTreeMap::new();
    let mut exact = 0;
    for ex in data {
        let caption = tokenize(&vocab.decode(&greedy_decode(params, &ex.cond, max_len)?));
        if ex.refs.contains(&caption) {
            exact += 1;
        }
        hyps.insert(ex.video_id.clone(), caption);
    }
    let refs: BTreeMap<String, Vec<TokenSequence>> = data
        .iter()
        .map(|e| (e.video_id.clone(), e.refs.clone()))
        .collect();
    Ok((corpus_eval(&hyps, &refs)?.cider_d, exact))
}

fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> CliResult<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut out, &row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn curve_path(args: &TrainArgs) -> PathBuf {
    args.curve
        .clone()
        .unwrap_or_else(|| args.out.with_extension("curve.jsonl"))
}

pub fn train(args: TrainArgs) -> CliResult<()> {
    let report = ReportBuilder::start("train");
    // Check the prerequisite before touching any data.
    let init = match (args.stage, &args.init) {
        (Stage::Scst, None) => {
            return Err(CliError::MissingPrerequisite(
                "scst needs a stage-one checkpoint via --init".into(),
            ))
        }
        (_, Some(path)) => Some(read_checkpoint(path)?),
        (Stage::Xe, None) => None,
    };
    let data = DataDir::load(&args.data)?;
    let refs = data.references()?;
    let vocab = match &init {
        Some(c) => c.vocab.clone(),
        None => vocab_from_refs(&refs)?,
    };
    let examples = training_examples(&data, &refs, &vocab, args.k)?;
    let dim = examples[0].cond.v_mean.len();
    if let Some(c) = &init {
        if c.params.feature_dim() != dim {
            return Err(CliError::Core(capkit::Error::ShapeMismatch(format!(
                "checkpoint expects {}-dim features, data has {dim}",
                c.params.feature_dim()
            ))));
        }
    }
    let curve = curve_path(&args);

    let (params, config, outputs) = match args.stage {
        Stage::Xe => {
            let defaults = TrainConfig::default();
            let cfg = TrainConfig {
                learning_rate: args.lr.unwrap_or(defaults.learning_rate),
                epochs: args.epochs.unwrap_or(defaults.epochs),
                seed: args.seed,
                max_len: args.max_len,
            };
            if cfg.learning_rate.is_nan() || cfg.learning_rate <= 0.0 {
                return Err(CliError::BadArgs("--lr must be positive".into()));
            }
            let start = match &init {
                Some(c) => c.params.clone(),
                None => cfg.initial_params(vocab.len(), dim),
            };
            let out = xe_train(&start, &examples, &cfg)?;
            write_jsonl(
                &curve,
                out.loss_curve
                    .iter()
                    .enumerate()
                    .map(|(epoch, loss)| json!({"epoch": epoch, "loss": loss})),
            )?;
            let (cider, exact) = greedy_quality(&out.params, &vocab, &examples, cfg.max_len)?;
            let outputs = json!({
                "final_loss": out.loss_curve.last(),
                "greedy_cider_d": cider,
                "exact_match": exact as f64 / examples.len() as f64,
            });
            (out.params, serde_json::to_value(cfg)?, outputs)
        }
        Stage::Scst => {
            let defaults = ScstConfig::default();
            let cfg = ScstConfig {
                steps: args.steps.unwrap_or(defaults.steps),
                learning_rate: args.lr.unwrap_or(defaults.learning_rate),
                seed: args.seed,
                samples_per_video: args.samples.unwrap_or(defaults.samples_per_video),
                max_len: args.max_len,
            };
            if cfg.learning_rate.is_nan()
                || cfg.learning_rate <= 0.0
                || cfg.steps == 0
                || cfg.samples_per_video == 0
            {
                return Err(CliError::BadArgs(
                    "--lr, --steps and --samples must be positive".into(),
                ));
            }
            let start = init
                .as_ref()
                .map(|c| c.params.clone())
                .expect("checked above");
            let idf = CorpusIdf::from_documents(examples.iter().map(|e| e.refs.as_slice()))?;
            let (before, _) = greedy_quality(&start, &vocab, &examples, cfg.max_len)?;
            let (params, history) = scst_train(&start, &vocab, &examples, &idf, &cfg)?;
            write_jsonl(
                &curve,
                history.iter().enumerate().map(|(step, d)| {
                    json!({"step": step, "reward": d.reward, "baseline": d.baseline, "advantage": d.advantage})
                }),
            )?;
            let (after, exact) = greedy_quality(&params, &vocab, &examples, cfg.max_len)?;
            let outputs = json!({
                "greedy_cider_d_before": before,
                "greedy_cider_d": after,
                "exact_match": exact as f64 / examples.len() as f64,
            });
            (params, serde_json::to_value(cfg)?, outputs)
        }
    };
    let stage = match args.stage {
        Stage::Xe => "xe",
        Stage::Scst => "scst",
    };
    write_checkpoint(
        &args.out,
        &Checkpoint {
            vocab,
            params,
            stage: stage.into(),
        },
    )?;
    eprintln!("{stage}: {outputs}");
    let config = json!({
        "stage": stage,
        "data": args.data,
        "init": args.init,
        "out": args.out,
        "curve": curve,
        "k": args.k,
        "train": config,
    });
    print_report(&report.finish(config, vec![args.seed], outputs)?)
}

pub fn decode(args: DecodeArgs) -> CliResult<()> {
    let report = ReportBuilder::start("decode");
    let ckpt = read_checkpoint(&args.checkpoint)?;
    let data = DataDir::load(&args.data)?;
    let mode: SamplingMode = args.mode.into();
    let seed = args.seed.unwrap_or(0);
    let mut captions = BTreeMap::new();
    let mut records = Vec::new();
    for (i, v) in data.videos.iter().enumerate() {
        let fused: Matrix = v.fused(i, args.k, mode, seed)?;
        if fused.cols() != ckpt.params.feature_dim() {
            return Err(CliError::Core(capkit::Error::ShapeMismatch(format!(
                "checkpoint expects {}-dim features, `{}` has {}",
                ckpt.params.feature_dim(),
                v.video_id,
                fused.cols()
            ))));
        }
        let cond = Conditioning::from_video(&ckpt.vocab, &fused, &v.subtitle);
        let (ids, steps) = greedy_decode_traced(&ckpt.params, &cond, args.max_len)?;
        captions.insert(v.video_id.clone(), ckpt.vocab.decode(&ids));
        records.push(TraceRecord {
            video_id: v.video_id.clone(),
            steps,
        });
    }
    write_hypotheses(&args.out, &captions)?;
    if let Some(path) = &args.trace {
        write_trace(
            path,
            &TraceFile {
                vocab: ckpt.vocab.clone(),
                records,
            },
        )?;
    }
    eprintln!(
        "decoded {} videos to {}",
        captions.len(),
        args.out.display()
    );
    let config = json!({
        "checkpoint": args.checkpoint,
        "data": args.data,
        "out": args.out,
        "trace": args.trace,
        "k": args.k,
        "mode": args.mode.name(),
        "max_len": args.max_len,
    });
    print_report(&report.finish(
        config,
        args.seed.into_iter().collect(),
        json!({ "captions": captions }),
    )?)
}
