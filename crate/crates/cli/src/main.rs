mod commands;
mod data;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use capkit::features::{SamplingMode, DEFAULT_SEGMENTS, DEFAULT_STRIDE_S, DEFAULT_WINDOW_S};

#[derive(Parser)]
#[command(
    name = "capkit",
    version,
    about = "Caption metrics, ensembling, feature sampling and a toy captioner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score hypotheses against references (BLEU-4, ROUGE-L, CIDEr-D).
    Eval(EvalArgs),
    /// Combine caption files, optionally with a word-level ensemble of models.
    Ensemble(EnsembleArgs),
    /// Print TSN frame indices for one video.
    Sample(SampleArgs),
    /// Sample and concatenate feature files into one CFF1 file.
    Fuse(FuseArgs),
    /// Print the sliding-window clip schedule of a video.
    Windows(WindowsArgs),
    /// Write the bundled synthetic captioning task as a data directory.
    Synth(SynthArgs),
    /// Train the toy captioner (cross-entropy or SCST stage).
    Train(TrainArgs),
    /// Greedy-decode captions with a checkpoint.
    Decode(DecodeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Bleu4,
    RougeL,
    CiderD,
}

impl Metric {
    pub fn key(self) -> &'static str {
        match self {
            Metric::Bleu4 => "bleu4",
            Metric::RougeL => "rouge_l",
            Metric::CiderD => "cider_d",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Train,
    Test,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Train => "train",
            Mode::Test => "test",
        }
    }
}

impl From<Mode> for SamplingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Train => SamplingMode::Train,
            Mode::Test => SamplingMode::Test,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Xe,
    Scst,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Hypothesis captions, one `{"video_id", "caption"}` record per line.
    #[arg(long)]
    pub hyp: PathBuf,
    /// Reference captions (`caption` or `captions` records).
    #[arg(long)]
    pub refs: PathBuf,
    /// Metrics to report.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Metric::Bleu4, Metric::RougeL, Metric::CiderD])]
    pub metrics: Vec<Metric>,
}

#[derive(Args)]
pub struct EnsembleArgs {
    /// Single-model caption files covering the same videos.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Where to write the winning captions.
    #[arg(long)]
    pub out: PathBuf,
    /// Model checkpoints for the word-level ensemble.
    #[arg(long = "checkpoint", requires = "data")]
    pub checkpoints: Vec<PathBuf>,
    /// Data directory supplying features and subtitles for checkpoints.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Recorded step distributions replayed as extra models.
    #[arg(long = "trace")]
    pub traces: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub k: usize,
    #[arg(long, default_value_t = 12)]
    pub max_len: usize,
}

#[derive(Args)]
pub struct SampleArgs {
    /// Number of frames in the video.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub k: usize,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Required in train mode.
    #[arg(long, required_if_eq("mode", "train"))]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct FuseArgs {
    /// CFF1 feature files, concatenated in the given order.
    #[arg(long = "features", required = true, num_args = 1..)]
    pub features: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub k: usize,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Required in train mode.
    #[arg(long, required_if_eq("mode", "train"))]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct WindowsArgs {
    #[arg(long)]
    pub duration: f64,
    #[arg(long, default_value_t = DEFAULT_WINDOW_S)]
    pub window: f64,
    #[arg(long, default_value_t = DEFAULT_STRIDE_S)]
    pub stride: f64,
}

#[derive(Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub videos: usize,
    #[arg(long, default_value_t = 4)]
    pub chases: usize,
}

#[derive(Args)]
pub struct TrainArgs {
    #[arg(value_enum)]
    pub stage: Stage,
    #[arg(long)]
    pub data: PathBuf,
    /// Output checkpoint.
    #[arg(long)]
    pub out: PathBuf,
    /// Stage-one checkpoint; required for `scst`.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Loss or reward curve; defaults to the checkpoint path with a
    /// `.curve.jsonl` extension.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    /// Learning rate; defaults to the stage's default.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Cross-entropy epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// SCST updates.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sampled captions per video and SCST update.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub k: usize,
    #[arg(long, default_value_t = 12)]
    pub max_len: usize,
}

#[derive(Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the per-step distributions as a trace file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Mode::Test)]
    pub mode: Mode,
    /// Required in train mode.
    #[arg(long, required_if_eq("mode", "train"))]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 12)]
    pub max_len: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(error::EXIT_BAD_ARGS as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Ensemble(a) => commands::ensemble(a),
        Command::Sample(a) => commands::sample(a),
        Command::Fuse(a) => commands::fuse(a),
        Command::Windows(a) => commands::windows(a),
        Command::Synth(a) => commands::synth(a),
        Command::Train(a) => commands::train(a),
        Command::Decode(a) => commands::decode(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
