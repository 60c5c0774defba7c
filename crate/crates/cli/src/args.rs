use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kgddi_core::{KgeModel, Norm, RcMode};

#[derive(Debug, Parser)]
#[command(
    name = "kgddi",
    version,
    about = "Knowledge-graph embeddings and KG-fused drug-drug interaction classification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print node and edge counts of a typed knowledge graph
    KgStats(KgStatsArgs),
    /// Train a knowledge-graph embedding model
    KgeTrain(KgeTrainArgs),
    /// Link-prediction MRR and Hits@k of trained embeddings
    KgeEval(KgeEvalArgs),
    /// Write per-drug embedding vectors as embeddings.tsv
    KgeExport(KgeExportArgs),
    /// Train the text or KG-fused relation classification head
    RcTrain(RcTrainArgs),
    /// Score a trained head against labelled instances
    RcEval(RcEvalArgs),
    /// Write per-instance predictions as predictions.tsv
    RcPredict(RcPredictArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::KgStats(_) => "kg-stats",
            Command::KgeTrain(_) => "kge-train",
            Command::KgeEval(_) => "kge-eval",
            Command::KgeExport(_) => "kge-export",
            Command::RcTrain(_) => "rc-train",
            Command::RcEval(_) => "rc-eval",
            Command::RcPredict(_) => "rc-predict",
        }
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` file supplying defaults for this subcommand's flags
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KgStatsArgs {
    #[arg(long, value_name = "FILE")]
    pub triples: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub types: PathBuf,
    /// Write the table here instead of standard output
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Transe,
    Transr,
    Rescal,
    Distmult,
}

impl From<ModelArg> for KgeModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Transe => KgeModel::TransE,
            ModelArg::Transr => KgeModel::TransR,
            ModelArg::Rescal => KgeModel::Rescal,
            ModelArg::Distmult => KgeModel::DistMult,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    L1,
    L2,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => Norm::L1,
            NormArg::L2 => Norm::L2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Text,
    Fused,
}

impl From<ModeArg> for RcMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Text => RcMode::Text,
            ModeArg::Fused => RcMode::Fused,
        }
    }
}

#[derive(Debug, Args)]
pub struct KgeTrainArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, value_name = "FILE")]
    pub triples: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub types: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub dim: usize,
    /// Relation-space width k (TransR only; defaults to --dim)
    #[arg(long)]
    pub relation_dim: Option<usize>,
    #[arg(long, default_value_t = 0.0001)]
    pub lr: f64,
    #[arg(long, default_value_t = 300)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    #[arg(long, default_value_t = 1)]
    pub negatives: usize,
    #[arg(long, value_enum, default_value_t = NormArg::L2)]
    pub norm: NormArg,
    #[arg(long, default_value_t = 256)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trained model file (JSON)
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Per-epoch `epoch<TAB>loss` log
    #[arg(long, value_name = "FILE")]
    pub loss_log: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct KgeEvalArgs {
    /// Model file written by kge-train
    #[arg(long, value_name = "FILE")]
    pub params: PathBuf,
    /// Held-out triples to rank
    #[arg(long, value_name = "FILE")]
    pub test: PathBuf,
    /// Every known triple (train, valid and test), used for filtering
    #[arg(long, value_name = "FILE")]
    pub all: Option<PathBuf>,
    /// Skip candidates that are known triples
    #[arg(long)]
    pub filtered: bool,
    /// Also write the report as `key=value` lines
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct KgeExportArgs {
    #[arg(long, value_name = "FILE")]
    pub params: PathBuf,
    /// Restrict and order the export to the drugs listed in this types file
    #[arg(long, value_name = "FILE")]
    pub types: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

/// Sources of KG vectors for the fused head.
#[derive(Debug, Args)]
pub struct LookupArgs {
    /// embeddings.tsv written by kge-export
    #[arg(long, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    /// `surface<TAB>entity_id` drug-name lexicon
    #[arg(long, value_name = "FILE")]
    pub names: Option<PathBuf>,
    /// word2vec text-format vectors for unlinkable mentions
    #[arg(long, value_name = "FILE")]
    pub wordvecs: Option<PathBuf>,
    #[arg(long, default_value_t = kgddi_core::rc::DEFAULT_MAX_SEQ_LEN)]
    pub max_seq_len: usize,
}

#[derive(Debug, Args)]
pub struct RcTrainArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Text)]
    pub mode: ModeArg,
    #[arg(long, value_name = "FILE")]
    pub instances: PathBuf,
    #[command(flatten)]
    pub lookup: LookupArgs,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    /// Output width of the KG projection (defaults to the embedding width)
    #[arg(long)]
    pub fused_dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trained head file (JSON)
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RcEvalArgs {
    /// Head file written by rc-train
    #[arg(long, value_name = "FILE")]
    pub params: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub instances: PathBuf,
    #[command(flatten)]
    pub lookup: LookupArgs,
    /// Also write the report as `key=value` lines
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RcPredictArgs {
    #[arg(long, value_name = "FILE")]
    pub params: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub instances: PathBuf,
    #[command(flatten)]
    pub lookup: LookupArgs,
    /// predictions.tsv destination (standard output when omitted)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}
