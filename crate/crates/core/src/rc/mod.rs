//! Drug-pair relation classification over precomputed encoder hidden states.
//!
//! The text head pools each drug's token span (mean, tanh, shared affine),
//! transforms the sequence-start row with its own affine map, and feeds the
//! concatenation to a softmax layer. The fused head additionally appends an
//! affine projection of the two drugs' KG embeddings.

mod features;
mod forward;
mod instance;
mod metrics;
mod params;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use features::{KgFeatures, KgeLookup};
pub use forward::{cls_transform, forward, fuse_kge, logits, pool_entity, softmax};
pub use instance::{read_instances, write_instances, InstanceSet, RcInstance, DEFAULT_MAX_SEQ_LEN};
pub use metrics::{evaluate, write_predictions, ClassMetrics, MetricsReport};
pub use params::{RcDims, RcModelFile, RcParams};
pub use train::{loss_and_grad, train_from, train_rc, RcTrainConfig, TrainedRc};

/// Interaction type between two drugs. `Int` is the generic "Interaction" class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RcLabel {
    Mechanism,
    Effect,
    Advice,
    Int,
    Other,
}

impl RcLabel {
    pub const COUNT: usize = 5;
    pub const ALL: [RcLabel; 5] = [
        RcLabel::Mechanism,
        RcLabel::Effect,
        RcLabel::Advice,
        RcLabel::Int,
        RcLabel::Other,
    ];
    /// The four interaction classes, in report order.
    pub const POSITIVE: [RcLabel; 4] = [RcLabel::Advice, RcLabel::Effect, RcLabel::Mechanism, RcLabel::Int];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RcLabel::Mechanism => "Mechanism",
            RcLabel::Effect => "Effect",
            RcLabel::Advice => "Advice",
            RcLabel::Int => "Int",
            RcLabel::Other => "Other",
        }
    }
}

impl FromStr for RcLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mechanism" => Ok(RcLabel::Mechanism),
            "effect" => Ok(RcLabel::Effect),
            "advice" => Ok(RcLabel::Advice),
            "int" | "interaction" => Ok(RcLabel::Int),
            "other" | "none" | "false" => Ok(RcLabel::Other),
            other => Err(Error::Validation(format!("unknown relation label `{other}`"))),
        }
    }
}

impl fmt::Display for RcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Text-only head or KG-fused head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RcMode {
    Text,
    Fused,
}

impl FromStr for RcMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(RcMode::Text),
            "fused" => Ok(RcMode::Fused),
            other => Err(Error::Argument(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for RcMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RcMode::Text => "text",
            RcMode::Fused => "fused",
        })
    }
}
