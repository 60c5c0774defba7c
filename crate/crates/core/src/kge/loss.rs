use std::collections::BTreeMap;

use ndarray::{Array1, Array2, Zip};

use super::{KgeModel, KgeParams};
use crate::error::{Error, Result};
use crate::graph::IndexedTriple;

/// Sparse gradient over the rows of [`KgeParams`] touched by a batch.
/// Keys are row indices; absent rows have zero gradient.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KgeGradient {
    pub entities: BTreeMap<usize, Array1<f64>>,
    pub relations: BTreeMap<usize, Array1<f64>>,
    pub matrices: BTreeMap<usize, Array2<f64>>,
}

fn accumulate<D: ndarray::Dimension>(
    map: &mut BTreeMap<usize, ndarray::Array<f64, D>>,
    key: usize,
    scale: f64,
    value: ndarray::Array<f64, D>,
) {
    match map.get_mut(&key) {
        Some(acc) => acc.scaled_add(scale, &value),
        None => {
            map.insert(key, value * scale);
        }
    }
}

impl KgeGradient {
    /// `params -= lr * self`.
    pub fn apply(&self, params: &mut KgeParams, lr: f64) {
        for (&i, g) in &self.entities {
            params.entities.row_mut(i).scaled_add(-lr, g);
        }
        for (&i, g) in &self.relations {
            params.relations.row_mut(i).scaled_add(-lr, g);
        }
        if let Some(m) = params.matrices.as_mut() {
            for (&i, g) in &self.matrices {
                m.index_axis_mut(ndarray::Axis(0), i).scaled_add(-lr, g);
            }
        }
    }

    /// Adds `scale * d score(t) / d params` into the gradient.
    fn add_score_gradient(&mut self, params: &KgeParams, t: IndexedTriple, scale: f64) {
        let h = params.entities.row(t.head);
        let tl = params.entities.row(t.tail);
        match params.model {
            KgeModel::TransE => {
                let x = &h + &params.relations.row(t.relation) - &tl;
                let g = params.norm.gradient(x.view());
                accumulate(&mut self.entities, t.head, scale, g.clone());
                accumulate(&mut self.entities, t.tail, -scale, g.clone());
                accumulate(&mut self.relations, t.relation, scale, g);
            }
            KgeModel::TransR => {
                let m = params.matrix(t.relation);
                let diff = &h - &tl;
                let x = m.dot(&diff) + params.relations.row(t.relation);
                let g = params.norm.gradient(x.view());
                let back = m.t().dot(&g);
                accumulate(&mut self.entities, t.head, scale, back.clone());
                accumulate(&mut self.entities, t.tail, -scale, back);
                let outer = outer(&g, &diff);
                accumulate(&mut self.relations, t.relation, scale, g);
                accumulate(&mut self.matrices, t.relation, scale, outer);
            }
            KgeModel::Rescal => {
                let m = params.matrix(t.relation);
                accumulate(&mut self.entities, t.head, scale, m.dot(&tl));
                accumulate(&mut self.entities, t.tail, scale, m.t().dot(&h));
                accumulate(&mut self.matrices, t.relation, scale, outer(&h.to_owned(), &tl.to_owned()));
            }
            KgeModel::DistMult => {
                let r = params.relations.row(t.relation);
                accumulate(&mut self.entities, t.head, scale, &r * &tl);
                accumulate(&mut self.entities, t.tail, scale, &r * &h);
                accumulate(&mut self.relations, t.relation, scale, &h * &tl);
            }
        }
    }
}

fn outer(a: &Array1<f64>, b: &Array1<f64>) -> Array2<f64> {
    let mut m = Array2::zeros((a.len(), b.len()));
    Zip::indexed(&mut m).for_each(|(i, j), v| *v = a[i] * b[j]);
    m
}

/// `log(1 + exp(x))` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Summed batch loss and its analytic gradient.
///
/// Negative `j` is paired with positive `j / n` where
/// `n = negatives.len() / positives.len()`. Translational models use the
/// margin ranking loss `max(0, margin + s(pos) - s(neg))` per pair; bilinear
/// models use `softplus(-s(pos))` per positive plus `softplus(s(neg))` per
/// negative (`margin` is ignored).
pub fn loss_and_grad(
    params: &KgeParams,
    positives: &[IndexedTriple],
    negatives: &[IndexedTriple],
    margin: f64,
) -> Result<(f64, KgeGradient)> {
    batch_loss(params, positives, negatives, margin, &|t| {
        format!("({}, {}, {})", t.head, t.relation, t.tail)
    })
}

/// [`loss_and_grad`] with a caller-supplied description for numeric errors.
pub(crate) fn batch_loss(
    params: &KgeParams,
    positives: &[IndexedTriple],
    negatives: &[IndexedTriple],
    margin: f64,
    describe: &dyn Fn(IndexedTriple) -> String,
) -> Result<(f64, KgeGradient)> {
    if positives.is_empty() {
        if negatives.is_empty() {
            return Ok((0.0, KgeGradient::default()));
        }
        return Err(Error::Precondition("negatives without positives".into()));
    }
    if negatives.len() % positives.len() != 0 || negatives.is_empty() {
        return Err(Error::Precondition(format!(
            "{} negatives do not align with {} positives",
            negatives.len(),
            positives.len()
        )));
    }
    for &t in positives.iter().chain(negatives) {
        params.check_indices(t)?;
    }
    let per_positive = negatives.len() / positives.len();
    let mut grad = KgeGradient::default();
    let mut total = 0.0;
    let non_finite = |t: IndexedTriple, what: &str| Error::Numeric {
        message: format!("non-finite {what}"),
        triple: describe(t),
    };

    if params.model.is_translational() {
        let pos_scores: Vec<f64> = positives.iter().map(|&t| params.score_unchecked(t)).collect();
        for (j, &neg) in negatives.iter().enumerate() {
            let p = j / per_positive;
            let s_pos = pos_scores[p];
            let s_neg = params.score_unchecked(neg);
            let l = margin + s_pos - s_neg;
            if !l.is_finite() {
                return Err(non_finite(if s_pos.is_finite() { neg } else { positives[p] }, "margin loss"));
            }
            if l > 0.0 {
                total += l;
                grad.add_score_gradient(params, positives[p], 1.0);
                grad.add_score_gradient(params, neg, -1.0);
            }
        }
    } else {
        for &pos in positives {
            let s = params.score_unchecked(pos);
            let l = softplus(-s);
            if !l.is_finite() {
                return Err(non_finite(pos, "logistic loss"));
            }
            total += l;
            grad.add_score_gradient(params, pos, -sigmoid(-s));
        }
        for &neg in negatives {
            let s = params.score_unchecked(neg);
            let l = softplus(s);
            if !l.is_finite() {
                return Err(non_finite(neg, "logistic loss"));
            }
            total += l;
            grad.add_score_gradient(params, neg, sigmoid(s));
        }
    }
    Ok((total, grad))
}
