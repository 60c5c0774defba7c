use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{KgeConfig, KgeParams};
use crate::error::{Error, Result};
use crate::graph::{EntityId, EntityKind, KnowledgeGraph, Schema, Vocabulary};

/// Trained parameters bundled with the vocabulary they index, so a saved model
/// can be evaluated or exported without the original types file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgeModelFile {
    pub config: KgeConfig,
    pub schema: Schema,
    pub entities: Vec<(EntityId, EntityKind)>,
    pub params: KgeParams,
}

impl KgeModelFile {
    pub fn new(config: KgeConfig, graph: &KnowledgeGraph, params: KgeParams) -> Self {
        let vocab = graph.vocab();
        KgeModelFile {
            config,
            schema: vocab.schema().clone(),
            entities: (0..vocab.num_entities())
                .map(|i| (vocab.entity(i).clone(), vocab.entity_kind(i)))
                .collect(),
            params,
        }
    }

    /// Rebuilds the vocabulary with the saved index order.
    pub fn vocabulary(&self) -> Result<Arc<Vocabulary>> {
        let mut vocab = Vocabulary::new(self.schema.clone());
        for (id, kind) in &self.entities {
            vocab.add_entity(id.as_str(), *kind)?;
        }
        if vocab.num_entities() != self.params.num_entities()
            || vocab.num_relations() != self.params.num_relations()
        {
            return Err(Error::Shape(format!(
                "model file lists {} entities / {} relations but parameters hold {} / {}",
                vocab.num_entities(),
                vocab.num_relations(),
                self.params.num_entities(),
                self.params.num_relations()
            )));
        }
        Ok(Arc::new(vocab))
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let file: KgeModelFile = serde_json::from_reader(r)?;
        if !file.params.all_finite() {
            return Err(Error::Validation("model file contains non-finite parameters".into()));
        }
        Ok(file)
    }
}
