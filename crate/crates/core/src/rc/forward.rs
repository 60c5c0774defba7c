use ndarray::{concatenate, s, Array1, ArrayView1, ArrayView2, Axis};

use super::{KgeLookup, RcInstance, RcMode, RcParams};
use crate::error::{Error, Result};

/// `W · tanh(mean(H[a..=b])) + b` for one entity span.
pub fn pool_entity(
    hidden: ArrayView2<f64>,
    span: (usize, usize),
    w: ArrayView2<f64>,
    b: ArrayView1<f64>,
) -> Result<Array1<f64>> {
    let pooled = span_activation(hidden, span)?;
    affine(w, b, pooled.view())
}

/// `W0 · tanh(h0) + b0` for the sequence-start row.
pub fn cls_transform(h0: ArrayView1<f64>, w0: ArrayView2<f64>, b0: ArrayView1<f64>) -> Result<Array1<f64>> {
    affine(w0, b0, h0.mapv(f64::tanh).view())
}

/// `W_f · [kge1; kge2] + b_f`.
pub fn fuse_kge(
    kge1: ArrayView1<f64>,
    kge2: ArrayView1<f64>,
    wf: ArrayView2<f64>,
    bf: ArrayView1<f64>,
) -> Result<Array1<f64>> {
    if kge1.len() != kge2.len() {
        return Err(Error::Shape(format!(
            "KG vectors differ in length: {} vs {}",
            kge1.len(),
            kge2.len()
        )));
    }
    let cat = concatenate(Axis(0), &[kge1, kge2]).expect("1-d concatenation");
    affine(wf, bf, cat.view())
}

fn affine(w: ArrayView2<f64>, b: ArrayView1<f64>, x: ArrayView1<f64>) -> Result<Array1<f64>> {
    if w.ncols() != x.len() || w.nrows() != b.len() {
        return Err(Error::Shape(format!(
            "affine map {}x{} (bias {}) applied to length {}",
            w.nrows(),
            w.ncols(),
            b.len(),
            x.len()
        )));
    }
    Ok(w.dot(&x) + b)
}

/// `tanh` of the mean of rows `a..=b`.
fn span_activation(hidden: ArrayView2<f64>, (a, b): (usize, usize)) -> Result<Array1<f64>> {
    if a == 0 || a > b || b >= hidden.nrows() {
        return Err(Error::Bounds(format!(
            "span ({a}, {b}) outside 1..{} (row 0 is reserved)",
            hidden.nrows()
        )));
    }
    let mean = hidden
        .slice(s![a..=b, ..])
        .mean_axis(Axis(0))
        .expect("non-empty span");
    Ok(mean.mapv(f64::tanh))
}

/// Max-subtracted softmax.
pub fn softmax(z: ArrayView1<f64>) -> Array1<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e = z.mapv(|v| (v - max).exp());
    let sum = e.sum();
    e / sum
}

/// Fixed (non-trainable) inputs of the head for one instance.
#[derive(Debug, Clone)]
pub(crate) struct Features {
    /// tanh(H_0)
    pub cls: Array1<f64>,
    /// tanh of the mean over each span
    pub span1: Array1<f64>,
    pub span2: Array1<f64>,
    /// [kge1; kge2], fused mode only
    pub kg: Option<Array1<f64>>,
}

pub(crate) fn features(
    instance: &RcInstance,
    params: &RcParams,
    mode: RcMode,
    lookup: Option<&dyn KgeLookup>,
) -> Result<Features> {
    let d = params.dims.hidden;
    if instance.dim() != d {
        return Err(Error::Shape(format!(
            "instance {} has hidden size {}, head expects {d}",
            instance.id,
            instance.dim()
        )));
    }
    let hidden = instance.hidden.view();
    if hidden.nrows() == 0 {
        return Err(Error::Bounds(format!("instance {} has no hidden rows", instance.id)));
    }
    let kg = match mode {
        RcMode::Text => None,
        RcMode::Fused => {
            let lookup = lookup.ok_or_else(|| {
                Error::Resolution(format!(
                    "{} (instance {}: fused mode needs KG vectors)",
                    instance.drug1.as_ref().map_or("<unlinked>", |d| d.as_str()),
                    instance.id
                ))
            })?;
            let k1 = lookup.resolve(instance.drug1.as_ref(), &instance.mention1)?;
            let k2 = lookup.resolve(instance.drug2.as_ref(), &instance.mention2)?;
            if k1.len() != params.dims.kg || k2.len() != params.dims.kg {
                return Err(Error::Shape(format!(
                    "KG vectors of length {}/{} for a head expecting {}",
                    k1.len(),
                    k2.len(),
                    params.dims.kg
                )));
            }
            Some(Array1::from_iter(k1.into_iter().chain(k2)))
        }
    };
    Ok(Features {
        cls: hidden.row(0).mapv(f64::tanh),
        span1: span_activation(hidden, instance.span1)?,
        span2: span_activation(hidden, instance.span2)?,
        kg,
    })
}

/// Concatenated input of the output layer.
pub(crate) fn output_input(f: &Features, params: &RcParams) -> Array1<f64> {
    let h0 = params.w0.dot(&f.cls) + &params.b0;
    let h1 = params.w.dot(&f.span1) + &params.b;
    let h2 = params.w.dot(&f.span2) + &params.b;
    let mut parts = vec![h0, h1, h2];
    if let Some(kg) = &f.kg {
        parts.push(params.wf.dot(kg) + &params.bf);
    }
    let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
    concatenate(Axis(0), &views).expect("1-d concatenation")
}

pub(crate) fn output_logits(x: &Array1<f64>, params: &RcParams, fused: bool) -> Array1<f64> {
    if fused {
        params.w3_fused.dot(x) + &params.b3_fused
    } else {
        params.w3_text.dot(x) + &params.b3_text
    }
}

/// Unnormalized class scores.
pub fn logits(
    instance: &RcInstance,
    params: &RcParams,
    mode: RcMode,
    lookup: Option<&dyn KgeLookup>,
) -> Result<Array1<f64>> {
    let f = features(instance, params, mode, lookup)?;
    let x = output_input(&f, params);
    Ok(output_logits(&x, params, f.kg.is_some()))
}

/// Class probabilities in [`RcLabel::ALL`](super::RcLabel::ALL) order.
pub fn forward(
    instance: &RcInstance,
    params: &RcParams,
    mode: RcMode,
    lookup: Option<&dyn KgeLookup>,
) -> Result<Array1<f64>> {
    Ok(softmax(logits(instance, params, mode, lookup)?.view()))
}
