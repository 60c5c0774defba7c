use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::loss::batch_loss;
use super::{init_params, sampling::corrupt_indexed, KgeConfig, KgeParams};
use crate::error::{Error, Result};
use crate::graph::KnowledgeGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedKge {
    pub params: KgeParams,
    /// Mean loss per positive triple, one entry per epoch.
    pub epoch_losses: Vec<f64>,
}

/// Plain mini-batch SGD over shuffled positives with filtered, type-constrained
/// negatives. Translational models keep entity rows on the unit sphere.
pub fn train(graph: &KnowledgeGraph, config: &KgeConfig) -> Result<TrainedKge> {
    config.validate()?;
    if graph.is_empty() {
        return Err(Error::Precondition("cannot train on an empty graph".into()));
    }
    let mut params = init_params(config, graph, config.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    let mut order: Vec<usize> = (0..graph.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let n_neg = config.negatives_per_positive;
    let mut positives = Vec::with_capacity(config.batch_size);
    let mut negatives = Vec::with_capacity(config.batch_size * n_neg);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            positives.clear();
            negatives.clear();
            for &i in batch {
                let pos = graph.triples()[i];
                positives.push(pos);
                for _ in 0..n_neg {
                    negatives.push(corrupt_indexed(pos, graph, &mut rng));
                }
            }
            let (loss, grad) = batch_loss(&params, &positives, &negatives, config.margin, &|t| {
                graph.vocab().triple(t).to_string()
            })?;
            epoch_loss += loss;
            grad.apply(&mut params, config.learning_rate);
            if config.model.is_translational() {
                let touched: BTreeSet<usize> = grad.entities.keys().copied().collect();
                params.normalize_rows(touched);
            }
        }
        let mean = epoch_loss / graph.len() as f64;
        log::debug!("epoch {epoch}: mean loss {mean}");
        epoch_losses.push(mean);
    }
    Ok(TrainedKge {
        params,
        epoch_losses,
    })
}

/// Writes `epoch<TAB>mean_loss` lines, epochs counted from 1.
pub fn write_training_log<W: Write>(losses: &[f64], mut w: W) -> Result<()> {
    for (i, loss) in losses.iter().enumerate() {
        writeln!(w, "{}\t{}", i + 1, loss)?;
    }
    Ok(())
}
