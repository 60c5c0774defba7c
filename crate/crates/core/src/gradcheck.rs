//! Central-difference checks of the analytic gradients of the KGE losses and
//! the relation-classification head.

use ndarray::Axis;
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::IndexedTriple;
use crate::kge::{init_params, loss_and_grad, KgeConfig, KgeModel, KgeParams, Norm};
use crate::rc::{self, KgFeatures, KgeLookup, RcDims, RcInstance, RcMode, RcParams};
use crate::synth;

/// Outcome of comparing an analytic gradient with finite differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    /// Number of scalar parameters compared.
    pub checked: usize,
    pub max_rel_error: f64,
    /// Location of the largest error, for diagnostics.
    pub worst: String,
}

impl GradCheck {
    fn new() -> Self {
        GradCheck {
            checked: 0,
            max_rel_error: 0.0,
            worst: String::new(),
        }
    }

    fn record(&mut self, analytic: f64, numeric: f64, at: impl FnOnce() -> String) {
        let err = relative_error(analytic, numeric);
        self.checked += 1;
        if err > self.max_rel_error || self.worst.is_empty() {
            self.max_rel_error = err;
            self.worst = format!("{} (analytic {analytic:e}, numeric {numeric:e})", at());
        }
    }

    /// Combines two results, keeping the worse location.
    pub fn merge(self, other: GradCheck) -> GradCheck {
        let checked = self.checked + other.checked;
        let mut worse = if other.max_rel_error > self.max_rel_error { other } else { self };
        worse.checked = checked;
        worse
    }
}

/// `|a - n| / max(|a|, |n|, 1e-3)`. The floor keeps gradients that are zero
/// up to rounding from reporting huge relative errors.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3)
}

/// Compares [`loss_and_grad`] with central differences of step `eps` over
/// every entity, relation and matrix entry.
pub fn check_kge_gradient(
    params: &KgeParams,
    positives: &[IndexedTriple],
    negatives: &[IndexedTriple],
    margin: f64,
    eps: f64,
) -> Result<GradCheck> {
    let (_, grad) = loss_and_grad(params, positives, negatives, margin)?;
    let mut dense = params.clone();
    dense.entities.fill(0.0);
    dense.relations.fill(0.0);
    if let Some(m) = dense.matrices.as_mut() {
        m.fill(0.0);
    }
    grad.apply(&mut dense, -1.0);

    let loss = |p: &KgeParams| loss_and_grad(p, positives, negatives, margin).map(|(l, _)| l);
    let mut probe = params.clone();
    let mut report = GradCheck::new();

    for ((i, j), &g) in dense.entities.indexed_iter() {
        let x = probe.entities[[i, j]];
        probe.entities[[i, j]] = x + eps;
        let up = loss(&probe)?;
        probe.entities[[i, j]] = x - eps;
        let down = loss(&probe)?;
        probe.entities[[i, j]] = x;
        report.record(g, (up - down) / (2.0 * eps), || format!("entity[{i},{j}]"));
    }
    for ((i, j), &g) in dense.relations.indexed_iter() {
        let x = probe.relations[[i, j]];
        probe.relations[[i, j]] = x + eps;
        let up = loss(&probe)?;
        probe.relations[[i, j]] = x - eps;
        let down = loss(&probe)?;
        probe.relations[[i, j]] = x;
        report.record(g, (up - down) / (2.0 * eps), || format!("relation[{i},{j}]"));
    }
    if let Some(m) = &dense.matrices {
        for ((r, i, j), &g) in m.indexed_iter() {
            fn slot(p: &mut KgeParams, at: [usize; 3]) -> &mut f64 {
                &mut p.matrices.as_mut().expect("same model")[at]
            }
            let at = [r, i, j];
            let x = *slot(&mut probe, at);
            *slot(&mut probe, at) = x + eps;
            let up = loss(&probe)?;
            *slot(&mut probe, at) = x - eps;
            let down = loss(&probe)?;
            *slot(&mut probe, at) = x;
            report.record(g, (up - down) / (2.0 * eps), || format!("matrix[{r},{i},{j}]"));
        }
    }
    Ok(report)
}

/// One randomized gradient-check problem for a KGE model.
#[derive(Debug, Clone)]
pub struct KgeCase {
    pub params: KgeParams,
    pub positives: Vec<IndexedTriple>,
    pub negatives: Vec<IndexedTriple>,
    pub margin: f64,
}

/// Random parameters of width `dim` over 6 entities and 2 relations, three
/// positives with two negatives each. Translational cases are redrawn until
/// no hinge term sits within `1e-3` of its kink.
pub fn random_kge_case(model: KgeModel, norm: Norm, dim: usize, seed: u64) -> KgeCase {
    let graph = synth::drug_graph(6, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = KgeConfig {
        dim,
        relation_dim: (model == KgeModel::TransR).then_some(dim.saturating_sub(2).max(1)),
        norm,
        ..KgeConfig::new(model)
    };
    let jitter = Uniform::new_inclusive(-0.5, 0.5);
    loop {
        let mut params = init_params(&config, &graph, rng.gen());
        params.entities.iter_mut().for_each(|v| *v += jitter.sample(&mut rng));
        params.relations.iter_mut().for_each(|v| *v += jitter.sample(&mut rng));
        if let Some(m) = params.matrices.as_mut() {
            m.iter_mut().for_each(|v| *v += jitter.sample(&mut rng));
        }
        let draw = |rng: &mut ChaCha8Rng| IndexedTriple::new(rng.gen_range(0..6), rng.gen_range(0..2), rng.gen_range(0..6));
        let positives: Vec<IndexedTriple> = (0..3).map(|_| draw(&mut rng)).collect();
        let negatives: Vec<IndexedTriple> = (0..6).map(|_| draw(&mut rng)).collect();
        let margin = 1.0;
        let near_kink = model.is_translational()
            && negatives.iter().enumerate().any(|(j, &n)| {
                let l = margin + params.score_indexed(positives[j / 2]).expect("in range")
                    - params.score_indexed(n).expect("in range");
                l.abs() < 1e-3
            });
        let near_zero_component = model.is_translational() && norm == Norm::L1 && {
            positives.iter().chain(&negatives).any(|&t| {
                let h = params.entities.row(t.head);
                let tl = params.entities.row(t.tail);
                let x = match &params.matrices {
                    Some(m) => m.index_axis(Axis(0), t.relation).dot(&(&h - &tl)) + params.relations.row(t.relation),
                    None => &h + &params.relations.row(t.relation) - &tl,
                };
                x.iter().any(|v| v.abs() < 1e-3)
            })
        };
        if !near_kink && !near_zero_component {
            return KgeCase {
                params,
                positives,
                negatives,
                margin,
            };
        }
    }
}

/// Compares [`rc::loss_and_grad`] with central differences over every block.
pub fn check_rc_gradient(
    batch: &[RcInstance],
    params: &RcParams,
    mode: RcMode,
    lookup: Option<&dyn KgeLookup>,
    eps: f64,
) -> Result<GradCheck> {
    let (_, grad) = rc::loss_and_grad(batch, params, mode, lookup)?;
    let mut probe = params.clone();
    let mut report = GradCheck::new();
    for (b, block) in grad.blocks().iter().enumerate() {
        for (k, &g) in block.iter().enumerate() {
            let x = probe.blocks()[b][k];
            probe.blocks_mut()[b][k] = x + eps;
            let up = rc_loss(batch, &probe, mode, lookup)?;
            probe.blocks_mut()[b][k] = x - eps;
            let down = rc_loss(batch, &probe, mode, lookup)?;
            probe.blocks_mut()[b][k] = x;
            report.record(g, (up - down) / (2.0 * eps), || format!("block {b} entry {k}"));
        }
    }
    Ok(report)
}

/// Mean cross-entropy from the forward pass alone.
fn rc_loss(batch: &[RcInstance], params: &RcParams, mode: RcMode, lookup: Option<&dyn KgeLookup>) -> Result<f64> {
    let mut total = 0.0;
    for inst in batch {
        let y = inst.label.expect("gradient-check instances are labelled");
        let z = rc::logits(inst, params, mode, lookup)?;
        let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_norm = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        total += log_norm - z[y.index()];
    }
    Ok(total / batch.len() as f64)
}

/// One randomized gradient-check problem for the classification head.
#[derive(Debug, Clone)]
pub struct RcCase {
    pub batch: Vec<RcInstance>,
    pub params: RcParams,
    pub lookup: KgFeatures,
}

/// Four instances with hidden width `hidden` and KG width `kg`, and fully
/// random parameters (biases included).
pub fn random_rc_case(hidden: usize, kg: usize, seed: u64) -> RcCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (batch, embeddings) = synth::separable_instances(4, hidden, kg, rng.gen());
    let mut params = RcParams::init(RcDims::new(hidden, kg), rng.gen());
    let jitter = Uniform::new_inclusive(-0.5, 0.5);
    for block in params.blocks_mut() {
        block.iter_mut().for_each(|v| *v += jitter.sample(&mut rng));
    }
    let lookup = KgFeatures::from_embeddings(embeddings).expect("non-empty, consistent widths");
    RcCase { batch, params, lookup }
}
