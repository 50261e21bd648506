use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "nea", version, about = "Topic models and the embeddings that mimic them")]
pub struct Cli {
    /// TOML file with pipeline settings; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize raw text into a corpus artifact.
    Ingest(IngestArgs),
    /// Train LDA by collapsed Gibbs sampling.
    TrainLda(TrainTopicArgs),
    /// Train the author-topic model.
    TrainAtm(TrainTopicArgs),
    /// Train the mixed-membership skip-gram topic model.
    TrainMmsgtm(TrainTopicArgs),
    /// Train embeddings that mimic a topic model.
    TrainNea(TrainNeaArgs),
    /// Train skip-gram word embeddings with negative sampling.
    TrainSg(TrainSgArgs),
    /// Softmax-smooth one embedding link into a conditional table.
    Smooth(SmoothArgs),
    /// Build unit-length document vectors.
    DocVectors(DocVectorsArgs),
    /// UMass coherence of each topic.
    Coherence(CoherenceArgs),
    /// Coauthor retrieval by symmetric KL between author topic mixtures.
    AuthorRank(AuthorRankArgs),
    /// Held-out document classification over feature sets.
    Classify(ClassifyArgs),
    /// Mean coherence of LDA and NEA topics over a grid of topic counts.
    Sweep(SweepArgs),
}

impl Command {
    pub fn stage(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::TrainLda(_) => "train-lda",
            Command::TrainAtm(_) => "train-atm",
            Command::TrainMmsgtm(_) => "train-mmsgtm",
            Command::TrainNea(_) => "train-nea",
            Command::TrainSg(_) => "train-sg",
            Command::Smooth(_) => "smooth",
            Command::DocVectors(_) => "doc-vectors",
            Command::Coherence(_) => "coherence",
            Command::AuthorRank(_) => "author-rank",
            Command::Classify(_) => "classify",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// A text file (one document per line) or a directory (one per file).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Comma-separated author names, one line per document.
    #[arg(long)]
    pub authors: Option<PathBuf>,
    /// One class label per line, one line per document.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// One stopword per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub min_count: Option<usize>,
    /// Keep the original case of tokens.
    #[arg(long)]
    pub keep_case: bool,
}

#[derive(Debug, Args)]
pub struct SamplerFlags {
    #[arg(long)]
    pub topics: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Context radius for skip-gram models.
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NeaFlags {
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub minibatches: Option<u64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub noise_exponent: Option<f64>,
    #[arg(long)]
    pub log_interval: Option<u64>,
    /// More than one worker trains lock-free and is not reproducible.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainTopicArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub sampler: SamplerFlags,
}

#[derive(Debug, Args)]
pub struct TrainNeaArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// The training corpus; required for author-topic and skip-gram topic models.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Embeddings artifact; the loss log goes to `<output>.loss.csv`.
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the input vectors of every entity as plain text.
    #[arg(long)]
    pub text_output: Option<PathBuf>,
    #[command(flatten)]
    pub nea: NeaFlags,
}

#[derive(Debug, Args)]
pub struct TrainSgArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub window: Option<usize>,
    /// Also write the word vectors as plain text.
    #[arg(long)]
    pub text_output: Option<PathBuf>,
    #[command(flatten)]
    pub nea: NeaFlags,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// `parent:child`, e.g. `author:topic`. Defaults to `topic:word`, or to
    /// the only pair in the file.
    #[arg(long)]
    pub link: Option<String>,
}

#[derive(Debug, Args)]
pub struct DocVectorsArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Topic model whose assignments combine topic vectors.
    #[arg(long, conflicts_with = "corpus")]
    pub model: Option<PathBuf>,
    /// Corpus whose tokens average skip-gram word vectors.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Scores the model's topics, and reports its topic sizes.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Scores a smoothed topic-word table instead of the model's topics.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Writes `<output>.csv` and `<output>.json`.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub top_words: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AuthorRankArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Author-topic model; ranks by its author mixtures.
    #[arg(long, conflicts_with_all = ["table", "tfidf"])]
    pub model: Option<PathBuf>,
    /// Smoothed author-topic table.
    #[arg(long, conflicts_with = "tfidf")]
    pub table: Option<PathBuf>,
    /// Rank by cosine distance of per-author tf-idf vectors.
    #[arg(long)]
    pub tfidf: bool,
    /// Writes `<output>.csv` and `<output>.json`.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub min_papers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Labeled corpus; split into train and test halves.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Comma-separated feature specs; `+` concatenates blocks.
    #[arg(long, default_value = "tfidf,lda,nea,sg,sg+nea,tfidf+nea")]
    pub features: String,
    /// Writes `<output>.csv` and `<output>.json`.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub split_ratio: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub l2_penalty: Option<f64>,
    #[command(flatten)]
    pub sampler: SamplerFlags,
    #[command(flatten)]
    pub nea: NeaFlags,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Comma-separated topic counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub topics: Vec<usize>,
    /// CSV with columns `K,model,mean_coherence`.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub top_words: Option<usize>,
    #[command(flatten)]
    pub nea: NeaFlags,
}
