//! Knowledge-graph embedding models: TransE, TransR, RESCAL and DistMult.
//!
//! Scores are stored in their literal form. Translational models return a
//! distance (lower is more plausible); bilinear models return a similarity
//! (higher is more plausible). Use [`KgeModel::orientation`] when ranking.

mod loss;
mod sampling;
mod store;
mod train;

use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array1, Array2, Array3, ArrayView1, Axis};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EntityId, EntityKind, IndexedTriple, KnowledgeGraph, Triple};

pub use loss::{loss_and_grad, KgeGradient};
pub use sampling::{corrupt, corrupt_indexed};
pub use store::KgeModelFile;
pub use train::{train, write_training_log, TrainedKge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KgeModel {
    TransE,
    TransR,
    Rescal,
    DistMult,
}

/// Which end of the score range marks a plausible triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    LowerIsBetter,
    HigherIsBetter,
}

impl Orientation {
    /// True if score `a` ranks strictly ahead of score `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Orientation::LowerIsBetter => a < b,
            Orientation::HigherIsBetter => a > b,
        }
    }
}

impl KgeModel {
    pub const ALL: [KgeModel; 4] = [
        KgeModel::TransE,
        KgeModel::TransR,
        KgeModel::Rescal,
        KgeModel::DistMult,
    ];

    pub fn is_translational(self) -> bool {
        matches!(self, KgeModel::TransE | KgeModel::TransR)
    }

    pub fn orientation(self) -> Orientation {
        if self.is_translational() {
            Orientation::LowerIsBetter
        } else {
            Orientation::HigherIsBetter
        }
    }
}

impl FromStr for KgeModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "transe" => Ok(KgeModel::TransE),
            "transr" => Ok(KgeModel::TransR),
            "rescal" => Ok(KgeModel::Rescal),
            "distmult" => Ok(KgeModel::DistMult),
            other => Err(Error::Argument(format!("unknown KGE model `{other}`"))),
        }
    }
}

impl fmt::Display for KgeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KgeModel::TransE => "transe",
            KgeModel::TransR => "transr",
            KgeModel::Rescal => "rescal",
            KgeModel::DistMult => "distmult",
        })
    }
}

/// Norm used by the translational distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            other => Err(Error::Argument(format!("unknown norm `{other}`"))),
        }
    }
}

impl Norm {
    fn value(self, x: ArrayView1<f64>) -> f64 {
        match self {
            Norm::L1 => x.iter().map(|v| v.abs()).sum(),
            Norm::L2 => x.dot(&x).sqrt(),
        }
    }

    /// Gradient of the norm at `x`. Zero at the non-differentiable points.
    fn gradient(self, x: ArrayView1<f64>) -> Array1<f64> {
        match self {
            Norm::L1 => x.mapv(|v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 }),
            Norm::L2 => {
                let n = x.dot(&x).sqrt();
                if n > 0.0 {
                    x.mapv(|v| v / n)
                } else {
                    Array1::zeros(x.len())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgeConfig {
    pub model: KgeModel,
    pub dim: usize,
    /// Relation-space width for TransR. `None` means `dim`.
    pub relation_dim: Option<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub margin: f64,
    pub negatives_per_positive: usize,
    pub norm: Norm,
    pub seed: u64,
    pub batch_size: usize,
}

impl Default for KgeConfig {
    fn default() -> Self {
        KgeConfig {
            model: KgeModel::TransE,
            dim: 200,
            relation_dim: None,
            learning_rate: 1e-4,
            epochs: 300,
            margin: 1.0,
            negatives_per_positive: 1,
            norm: Norm::L2,
            seed: 0,
            batch_size: 256,
        }
    }
}

impl KgeConfig {
    pub fn new(model: KgeModel) -> Self {
        KgeConfig {
            model,
            ..Default::default()
        }
    }

    pub fn relation_dim(&self) -> usize {
        self.relation_dim.unwrap_or(self.dim)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dim", self.dim),
            ("relation_dim", self.relation_dim()),
            ("negatives_per_positive", self.negatives_per_positive),
            ("batch_size", self.batch_size),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Argument(format!("{name} must be positive")));
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Argument("learning_rate must be positive".into()));
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::Argument("margin must be positive".into()));
        }
        Ok(())
    }
}

/// Trainable parameters of one embedding model.
///
/// `relations` is `|R|×d` for TransE/DistMult, `|R|×k` for TransR and `|R|×0`
/// for RESCAL. `matrices` holds `|R|×k×d` projections for TransR and `|R|×d×d`
/// bilinear forms for RESCAL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgeParams {
    pub model: KgeModel,
    pub norm: Norm,
    pub entities: Array2<f64>,
    pub relations: Array2<f64>,
    pub matrices: Option<Array3<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTriple {
    pub triple: Triple,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrugEmbedding {
    pub entity: EntityId,
    pub vector: Vec<f64>,
}

/// Uniform `[-6/√d, 6/√d]` initialization; translational entity rows start on
/// the unit sphere and TransR projections start as truncated identities.
pub fn init_params(config: &KgeConfig, graph: &KnowledgeGraph, seed: u64) -> KgeParams {
    let d = config.dim;
    let k = config.relation_dim();
    let n_entities = graph.vocab().num_entities();
    let n_relations = graph.vocab().num_relations();
    let bound = 6.0 / (d as f64).sqrt();
    let uniform = Uniform::new_inclusive(-bound, bound);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |shape: (usize, usize)| {
        Array2::from_shape_simple_fn(shape, || uniform.sample(&mut rng))
    };

    let mut entities = draw((n_entities, d));
    let (relations, matrices) = match config.model {
        KgeModel::TransE | KgeModel::DistMult => (draw((n_relations, d)), None),
        KgeModel::TransR => {
            let rel = draw((n_relations, k));
            let mut m = Array3::zeros((n_relations, k, d));
            for r in 0..n_relations {
                for i in 0..k.min(d) {
                    m[[r, i, i]] = 1.0;
                }
            }
            (rel, Some(m))
        }
        KgeModel::Rescal => {
            let m = draw((n_relations, d * d))
                .into_shape_with_order((n_relations, d, d))
                .expect("element count matches");
            (Array2::zeros((n_relations, 0)), Some(m))
        }
    };
    if config.model.is_translational() {
        for mut row in entities.axis_iter_mut(Axis(0)) {
            let n = row.dot(&row).sqrt();
            if n > 0.0 {
                row /= n;
            }
        }
    }
    KgeParams {
        model: config.model,
        norm: config.norm,
        entities,
        relations,
        matrices,
    }
}

impl KgeParams {
    pub fn dim(&self) -> usize {
        self.entities.ncols()
    }

    pub fn num_entities(&self) -> usize {
        self.entities.nrows()
    }

    pub fn num_relations(&self) -> usize {
        match &self.matrices {
            Some(m) => m.len_of(Axis(0)),
            None => self.relations.nrows(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.entities.iter().all(|v| v.is_finite())
            && self.relations.iter().all(|v| v.is_finite())
            && self
                .matrices
                .as_ref()
                .is_none_or(|m| m.iter().all(|v| v.is_finite()))
    }

    fn check_indices(&self, t: IndexedTriple) -> Result<()> {
        if t.head >= self.num_entities()
            || t.tail >= self.num_entities()
            || t.relation >= self.num_relations()
        {
            return Err(Error::Lookup(format!(
                "triple {t:?} outside parameter tables ({} entities, {} relations)",
                self.num_entities(),
                self.num_relations()
            )));
        }
        Ok(())
    }

    /// Scores a triple given by vocabulary indices.
    pub fn score_indexed(&self, t: IndexedTriple) -> Result<f64> {
        self.check_indices(t)?;
        Ok(self.score_unchecked(t))
    }

    pub(crate) fn score_unchecked(&self, t: IndexedTriple) -> f64 {
        let h = self.entities.row(t.head);
        let tl = self.entities.row(t.tail);
        match self.model {
            KgeModel::TransE => {
                let r = self.relations.row(t.relation);
                let x = &h + &r - &tl;
                self.norm.value(x.view())
            }
            KgeModel::TransR => {
                let m = self.matrix(t.relation);
                let r = self.relations.row(t.relation);
                let x = m.dot(&h) + r - m.dot(&tl);
                self.norm.value(x.view())
            }
            KgeModel::Rescal => h.dot(&self.matrix(t.relation).dot(&tl)),
            KgeModel::DistMult => {
                let r = self.relations.row(t.relation);
                h.iter().zip(r).zip(tl).map(|((a, b), c)| a * b * c).sum()
            }
        }
    }

    pub(crate) fn matrix(&self, relation: usize) -> ndarray::ArrayView2<'_, f64> {
        self.matrices
            .as_ref()
            .expect("model carries relation matrices")
            .slice(s![relation, .., ..])
    }

    /// Renormalizes the given entity rows to unit L2 norm.
    pub(crate) fn normalize_rows(&mut self, rows: impl IntoIterator<Item = usize>) {
        for i in rows {
            let mut row = self.entities.row_mut(i);
            let n = row.dot(&row).sqrt();
            if n > 0.0 {
                row /= n;
            }
        }
    }
}

/// Scores a named triple against the graph's vocabulary.
pub fn score(params: &KgeParams, graph: &KnowledgeGraph, triple: &Triple) -> Result<ScoredTriple> {
    let t = graph.vocab().index_triple(triple)?;
    Ok(ScoredTriple {
        triple: triple.clone(),
        score: params.score_indexed(t)?,
    })
}

/// One vector per drug entity, taken from the entity-space table.
pub fn drug_embeddings(params: &KgeParams, graph: &KnowledgeGraph) -> Vec<DrugEmbedding> {
    let vocab = graph.vocab();
    vocab
        .entities_of_kind(EntityKind::Drug)
        .iter()
        .map(|&i| DrugEmbedding {
            entity: vocab.entity(i).clone(),
            vector: params.entities.row(i).to_vec(),
        })
        .collect()
}
