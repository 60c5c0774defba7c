use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::EntityId;
use crate::kge::DrugEmbedding;
use crate::linker::{FallbackTable, Lexicon};

/// Source of the per-drug KG vectors consumed by the fused head.
pub trait KgeLookup {
    fn dim(&self) -> usize;

    /// Vector for one drug mention, given its entity id when the instance has one.
    fn resolve(&self, drug: Option<&EntityId>, mention: &str) -> Result<Vec<f64>>;
}

/// Trained drug embeddings with optional lexicon linking and word-vector fallback.
///
/// Resolution order: the instance's own drug id, then the lexicon's link for the
/// mention, then the fallback table.
#[derive(Debug, Clone)]
pub struct KgFeatures {
    dim: usize,
    embeddings: HashMap<EntityId, Vec<f64>>,
    lexicon: Option<Lexicon>,
    fallback: Option<FallbackTable>,
}

impl KgFeatures {
    pub fn new(embeddings: Vec<DrugEmbedding>, dim: usize) -> Result<Self> {
        let mut map = HashMap::with_capacity(embeddings.len());
        for e in embeddings {
            if e.vector.len() != dim {
                return Err(Error::Shape(format!(
                    "embedding for {} has dimension {}, expected {dim}",
                    e.entity,
                    e.vector.len()
                )));
            }
            map.insert(e.entity, e.vector);
        }
        Ok(KgFeatures {
            dim,
            embeddings: map,
            lexicon: None,
            fallback: None,
        })
    }

    /// Builds from a non-empty embedding list, taking the dimension from it.
    pub fn from_embeddings(embeddings: Vec<DrugEmbedding>) -> Result<Self> {
        let dim = embeddings
            .first()
            .map(|e| e.vector.len())
            .ok_or_else(|| Error::Argument("no drug embeddings supplied".into()))?;
        Self::new(embeddings, dim)
    }

    pub fn with_lexicon(mut self, lexicon: Lexicon) -> Self {
        self.lexicon = Some(lexicon);
        self
    }

    pub fn with_fallback(mut self, table: FallbackTable) -> Result<Self> {
        if table.dim() != self.dim {
            return Err(Error::Shape(format!(
                "word vectors have dimension {}, KG embeddings {}",
                table.dim(),
                self.dim
            )));
        }
        self.fallback = Some(table);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.embeddings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.embeddings.is_empty()
    }
}

impl KgeLookup for KgFeatures {
    fn dim(&self) -> usize {
        self.dim
    }

    fn resolve(&self, drug: Option<&EntityId>, mention: &str) -> Result<Vec<f64>> {
        if let Some(v) = drug.and_then(|d| self.embeddings.get(d)) {
            return Ok(v.clone());
        }
        if let Some(v) = self
            .lexicon
            .as_ref()
            .and_then(|l| l.link(mention))
            .and_then(|id| self.embeddings.get(&id))
        {
            return Ok(v.clone());
        }
        match &self.fallback {
            Some(table) if !mention.trim().is_empty() => table.fallback_vector(mention),
            _ => Err(Error::Resolution(match drug {
                Some(d) => format!("{d} (mention `{mention}`)"),
                None => format!("mention `{mention}`"),
            })),
        }
    }
}
