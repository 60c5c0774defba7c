//! Knowledge-graph embeddings (TransE, TransR, RESCAL, DistMult) and a
//! drug-drug interaction relation classifier that fuses contextual hidden
//! states with KG drug vectors.
//!
//! - [`graph`]: typed knowledge graph loading, statistics and splits
//! - [`kge`]: embedding models, negative sampling and SGD training
//! - [`eval`]: filtered link prediction and `embeddings.tsv` I/O
//! - [`linker`]: mention-to-entity linking and word-vector fallback
//! - [`rc`]: text and KG-fused classification heads, training and metrics
//! - [`gradcheck`]: finite-difference checks of the analytic gradients
//! - [`synth`]: seeded synthetic data

pub mod error;
pub mod eval;
pub mod gradcheck;
pub mod graph;
pub mod kge;
pub mod linker;
pub mod rc;
pub mod synth;


pub use error::{Error, Result};
pub use eval::{export_embeddings, import_embeddings, query_rank, rank_triples, LinkPredictionReport, RankMode};
pub use graph::{EntityId, EntityKind, IndexedTriple, KgStats, KnowledgeGraph, RelationKind, Schema, Triple, Vocabulary};
pub use kge::{DrugEmbedding, KgeConfig, KgeModel, KgeParams, Norm};
pub use linker::{FallbackTable, Lexicon};
pub use rc::{MetricsReport, RcInstance, RcLabel, RcMode, RcParams, RcTrainConfig};
