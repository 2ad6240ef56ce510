//! Command-line pipeline: ingest, topic modeling, word analytics and tag
//! prediction over a directory of text files plus a metadata file.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use etdkit::classify::EvalPopulation;
use etdkit::preprocess::TextSource;

pub use config::RunConfig;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for bad arguments or configuration.
pub const EXIT_USAGE: i32 = 1;
/// Exit status for unusable input data.
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] etdkit::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_config() => EXIT_USAGE,
            _ => EXIT_DATA,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "etdkit",
    version,
    about = "Topic modeling and tag prediction for thesis corpora"
)]
pub struct Cli {
    /// Read settings from a run configuration (e.g. a previous runconfig.json).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master random seed; replaces every stage seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a corpus and print a summary.
    Ingest(CorpusArgs),
    /// Fit a topic model and write document tags, top words and a report.
    Topics(TopicsArgs),
    /// Keyword trends and collocate networks.
    Analyze(AnalyzeArgs),
    /// Train a tag classifier and evaluate it on a held-out split.
    Train(TrainArgs),
    /// Tag new documents with a trained model.
    Predict(PredictArgs),
    /// Evaluate a trained model against a tagged corpus.
    Eval(EvalArgs),
    /// Write a synthetic corpus with planted topics.
    Generate(GenerateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Topics(_) => "topics",
            Command::Analyze(_) => "analyze",
            Command::Train(_) => "train",
            Command::Predict(_) => "predict",
            Command::Eval(_) => "eval",
            Command::Generate(_) => "generate",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CorpusArgs {
    /// Corpus root holding `texts/` and `metadata.jsonl`.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Directory of `<id>.txt` files.
    #[arg(long)]
    pub texts: Option<PathBuf>,
    /// JSON-lines metadata, one record per document.
    #[arg(long)]
    pub metadata: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct LdaArgs {
    /// Number of topics.
    #[arg(long = "k")]
    pub topics: Option<usize>,
    /// Total Dirichlet concentration over topics.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Treat --alpha as the per-topic value instead of the total.
    #[arg(long)]
    pub alpha_per_topic: bool,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Gibbs sweeps.
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, value_enum)]
    pub topic_source: Option<Source>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Source {
    Body,
    Bibliographic,
}

impl From<Source> for TextSource {
    fn from(s: Source) -> Self {
        match s {
            Source::Body => TextSource::Body,
            Source::Bibliographic => TextSource::Bibliographic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Population {
    Test,
    All,
}

impl From<Population> for EvalPopulation {
    fn from(p: Population) -> Self {
        match p {
            Population::Test => EvalPopulation::Test,
            Population::All => EvalPopulation::All,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TopicsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub lda: LdaArgs,
    /// Words per topic in topic_words.csv and the report.
    #[arg(long)]
    pub top_words: Option<usize>,
    /// Representative documents per topic in the report.
    #[arg(long)]
    pub top_docs: Option<usize>,
    /// Leave the generation time out of report.html.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Keyword or prefix query such as `librar*`; repeatable.
    #[arg(long = "keyword")]
    pub keywords: Vec<String>,
    /// File with one keyword per line.
    #[arg(long)]
    pub keywords_file: Option<PathBuf>,
    /// Earlier `topics` output; its top words become the keywords.
    #[arg(long)]
    pub topics_dir: Option<PathBuf>,
    /// Words on each side of a keyword.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub segments: Option<usize>,
    /// Collocates kept per keyword.
    #[arg(long)]
    pub top_n: Option<usize>,
    /// Keep stop words.
    #[arg(long)]
    pub raw_stream: bool,
    #[arg(long, value_enum)]
    pub source: Option<Source>,
}

#[derive(Debug, Clone, Args)]
pub struct TagArgs {
    /// CSV with `doc_id` and `tag` columns.
    #[arg(long)]
    pub tags: Option<PathBuf>,
    /// Earlier `topics` output; tags come from its doc_topics.csv.
    #[arg(long)]
    pub topics_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub tags: TagArgs,
    /// Used only when tags come from an inline topic model.
    #[command(flatten)]
    pub lda: LdaArgs,
    /// Fraction of documents used for training.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// SVM regularization trade-off.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// Keep tag proportions in the split.
    #[arg(long)]
    pub stratified: bool,
    #[arg(long, value_enum)]
    pub eval_on: Option<Population>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    /// Output directory of `train`.
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    /// Text files to tag.
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub tags: TagArgs,
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub eval_on: Option<Population>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Comma-separated document counts, one per planted topic.
    #[arg(long, value_delimiter = ',')]
    pub docs_per_topic: Vec<usize>,
    #[arg(long)]
    pub min_len: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose);
    match commands::dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}
