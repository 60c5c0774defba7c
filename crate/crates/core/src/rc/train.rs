use ndarray::{s, Array1, Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::forward::{features, output_input, output_logits, softmax, Features};
use super::{KgeLookup, RcDims, RcInstance, RcLabel, RcMode, RcParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcTrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub mode: RcMode,
    /// Width of the KG projection; `None` uses the KG embedding width.
    pub fused_dim: Option<usize>,
}

impl Default for RcTrainConfig {
    fn default() -> Self {
        RcTrainConfig {
            epochs: 5,
            learning_rate: 0.01,
            batch_size: 32,
            seed: 0,
            mode: RcMode::Text,
            fused_dim: None,
        }
    }
}

impl RcTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Argument("batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Argument("learning_rate must be positive".into()));
        }
        if self.fused_dim == Some(0) {
            return Err(Error::Argument("fused_dim must be positive".into()));
        }
        Ok(())
    }

    /// Head dimensions for hidden size `hidden` and the given KG source.
    pub fn dims(&self, hidden: usize, lookup: Option<&dyn KgeLookup>) -> RcDims {
        let kg = lookup.map_or(0, |l| l.dim());
        RcDims {
            hidden,
            kg,
            fused: self.fused_dim.unwrap_or(kg),
            classes: RcLabel::COUNT,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedRc {
    pub params: RcParams,
    /// Mean cross-entropy over the dataset, one entry per epoch.
    pub epoch_losses: Vec<f64>,
}

fn outer(a: ArrayView1<f64>, b: ArrayView1<f64>) -> Array2<f64> {
    let a2 = a.insert_axis(ndarray::Axis(1));
    let b2 = b.insert_axis(ndarray::Axis(0));
    a2.dot(&b2)
}

/// Adds the cross-entropy gradient of one example into `grad`; returns its loss.
fn accumulate_example(f: &Features, gold: RcLabel, params: &RcParams, grad: &mut RcParams) -> f64 {
    let d = params.dims.hidden;
    let fused = f.kg.is_some();
    let x = output_input(f, params);
    let p = softmax(output_logits(&x, params, fused).view());
    let loss = -p[gold.index()].ln();
    let mut dz = p;
    dz[gold.index()] -= 1.0;

    let (w3, dw3, db3) = if fused {
        (&params.w3_fused, &mut grad.w3_fused, &mut grad.b3_fused)
    } else {
        (&params.w3_text, &mut grad.w3_text, &mut grad.b3_text)
    };
    *dw3 += &outer(dz.view(), x.view());
    *db3 += &dz;
    let dx: Array1<f64> = w3.t().dot(&dz);

    let dh0 = dx.slice(s![0..d]);
    let dh1 = dx.slice(s![d..2 * d]);
    let dh2 = dx.slice(s![2 * d..3 * d]);
    grad.w0 += &outer(dh0, f.cls.view());
    grad.b0 += &dh0;
    grad.w += &outer(dh1, f.span1.view());
    grad.w += &outer(dh2, f.span2.view());
    grad.b += &dh1;
    grad.b += &dh2;
    if let Some(kg) = &f.kg {
        let dk = dx.slice(s![3 * d..]);
        grad.wf += &outer(dk, kg.view());
        grad.bf += &dk;
    }
    loss
}

fn gold(instance: &RcInstance) -> Result<RcLabel> {
    instance
        .label
        .ok_or_else(|| Error::Validation(format!("instance {} has no label", instance.id)))
}

/// Mean cross-entropy over `batch` and its gradient with respect to every
/// parameter block. Hidden states and KG vectors are treated as constants.
pub fn loss_and_grad(
    batch: &[RcInstance],
    params: &RcParams,
    mode: RcMode,
    lookup: Option<&dyn KgeLookup>,
) -> Result<(f64, RcParams)> {
    let mut grad = RcParams::zeros(params.dims);
    if batch.is_empty() {
        return Ok((0.0, grad));
    }
    let mut total = 0.0;
    for inst in batch {
        let y = gold(inst)?;
        let f = features(inst, params, mode, lookup)?;
        total += accumulate_example(&f, y, params, &mut grad);
    }
    let n = batch.len() as f64;
    for block in grad.blocks_mut() {
        block.iter_mut().for_each(|v| *v /= n);
    }
    Ok((total / n, grad))
}

/// Mini-batch gradient descent on mean cross-entropy with a constant step.
pub fn train_rc(
    dataset: &[RcInstance],
    config: &RcTrainConfig,
    lookup: Option<&dyn KgeLookup>,
) -> Result<TrainedRc> {
    config.validate()?;
    let first = dataset
        .first()
        .ok_or_else(|| Error::Precondition("cannot train on an empty dataset".into()))?;
    if config.mode == RcMode::Fused && lookup.is_none() {
        return Err(Error::Precondition("fused mode requires KG vectors".into()));
    }
    let dims = config.dims(first.dim(), lookup);
    let init = RcParams::init(dims, config.seed);
    train_from(dataset, config, lookup, init)
}

/// [`train_rc`] starting from explicit parameters.
pub fn train_from(
    dataset: &[RcInstance],
    config: &RcTrainConfig,
    lookup: Option<&dyn KgeLookup>,
    mut params: RcParams,
) -> Result<TrainedRc> {
    config.validate()?;
    params.check_shapes()?;
    // hidden states are fixed, so per-instance features are computed once
    let mut prepared = Vec::with_capacity(dataset.len());
    for inst in dataset {
        prepared.push((features(inst, &params, config.mode, lookup)?, gold(inst)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut grad = RcParams::zeros(params.dims);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            grad.blocks_mut().into_iter().for_each(|b| b.fill(0.0));
            for &i in batch {
                let (f, y) = &prepared[i];
                epoch_loss += accumulate_example(f, *y, &params, &mut grad);
            }
            params.add_scaled(-config.learning_rate / batch.len() as f64, &grad);
        }
        let mean = epoch_loss / prepared.len().max(1) as f64;
        log::debug!("rc epoch {epoch}: mean loss {mean}");
        epoch_losses.push(mean);
    }
    Ok(TrainedRc {
        params,
        epoch_losses,
    })
}
