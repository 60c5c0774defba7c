use std::fmt;
use std::io::Write;

use super::forward::forward;
use super::{KgeLookup, RcInstance, RcLabel, RcMode, RcParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold instances of this class.
    pub support: usize,
    /// Instances predicted as this class.
    pub predicted: usize,
    pub true_positives: usize,
}

impl ClassMetrics {
    fn from_counts(tp: usize, predicted: usize, support: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics {
            precision,
            recall,
            f1,
            support,
            predicted,
            true_positives: tp,
        }
    }

    fn observed(&self) -> bool {
        self.support > 0 || self.predicted > 0
    }
}

/// Per-class and aggregate scores over the four interaction classes.
///
/// Macro scores average the interaction classes that occur in the gold labels
/// or the predictions; classes absent from both carry no information and are
/// left out. Micro scores pool the counts of all four classes.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Indexed by [`RcLabel::index`].
    pub per_class: [ClassMetrics; RcLabel::COUNT],
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub accuracy: f64,
    pub n_instances: usize,
}

impl MetricsReport {
    pub fn class(&self, label: RcLabel) -> &ClassMetrics {
        &self.per_class[label.index()]
    }

    /// Builds the report from (gold, predicted) pairs.
    pub fn from_pairs(pairs: &[(RcLabel, RcLabel)]) -> Self {
        let mut tp = [0usize; RcLabel::COUNT];
        let mut predicted = [0usize; RcLabel::COUNT];
        let mut support = [0usize; RcLabel::COUNT];
        let mut correct = 0;
        for &(gold, pred) in pairs {
            support[gold.index()] += 1;
            predicted[pred.index()] += 1;
            if gold == pred {
                tp[gold.index()] += 1;
                correct += 1;
            }
        }
        let per_class: [ClassMetrics; RcLabel::COUNT] =
            std::array::from_fn(|i| ClassMetrics::from_counts(tp[i], predicted[i], support[i]));

        let observed: Vec<&ClassMetrics> = RcLabel::POSITIVE
            .iter()
            .map(|l| &per_class[l.index()])
            .filter(|m| m.observed())
            .collect();
        let mean = |f: fn(&ClassMetrics) -> f64| {
            if observed.is_empty() {
                0.0
            } else {
                observed.iter().map(|m| f(m)).sum::<f64>() / observed.len() as f64
            }
        };
        let pooled = RcLabel::POSITIVE.iter().fold((0, 0, 0), |(t, p, s), l| {
            let i = l.index();
            (t + tp[i], p + predicted[i], s + support[i])
        });
        let micro = ClassMetrics::from_counts(pooled.0, pooled.1, pooled.2);
        MetricsReport {
            per_class,
            macro_precision: mean(|m| m.precision),
            macro_recall: mean(|m| m.recall),
            macro_f1: mean(|m| m.f1),
            micro_precision: micro.precision,
            micro_recall: micro.recall,
            micro_f1: micro.f1,
            accuracy: if pairs.is_empty() { 0.0 } else { correct as f64 / pairs.len() as f64 },
            n_instances: pairs.len(),
        }
    }

    /// `key=value` lines for machine consumption.
    pub fn write_key_values<W: Write>(&self, mut w: W) -> Result<()> {
        for label in RcLabel::ALL {
            let m = self.class(label);
            let name = label.as_str().to_lowercase();
            writeln!(w, "{name}.precision={}", m.precision)?;
            writeln!(w, "{name}.recall={}", m.recall)?;
            writeln!(w, "{name}.f1={}", m.f1)?;
            writeln!(w, "{name}.support={}", m.support)?;
        }
        writeln!(w, "macro.precision={}", self.macro_precision)?;
        writeln!(w, "macro.recall={}", self.macro_recall)?;
        writeln!(w, "macro.f1={}", self.macro_f1)?;
        writeln!(w, "micro.precision={}", self.micro_precision)?;
        writeln!(w, "micro.recall={}", self.micro_recall)?;
        writeln!(w, "micro.f1={}", self.micro_f1)?;
        writeln!(w, "accuracy={}", self.accuracy)?;
        writeln!(w, "n={}", self.n_instances)?;
        Ok(())
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>9} {:>9} {:>9} {:>8}", "class", "P", "R", "F1", "support")?;
        for label in RcLabel::POSITIVE {
            let m = self.class(label);
            writeln!(
                f,
                "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}",
                label.as_str(),
                m.precision,
                m.recall,
                m.f1,
                m.support
            )?;
        }
        let positive_support: usize = RcLabel::POSITIVE.iter().map(|l| self.class(*l).support).sum();
        writeln!(
            f,
            "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}",
            "macro", self.macro_precision, self.macro_recall, self.macro_f1, positive_support
        )?;
        writeln!(
            f,
            "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}",
            "micro", self.micro_precision, self.micro_recall, self.micro_f1, positive_support
        )?;
        write!(f, "{:<10} {:>9.4} {:>9} {:>9} {:>8}", "accuracy", self.accuracy, "", "", self.n_instances)
    }
}

fn argmax(p: &ndarray::Array1<f64>) -> RcLabel {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    RcLabel::from_index(best).expect("probability vector has one entry per class")
}

/// Argmax predictions scored against gold labels.
pub fn evaluate(
    dataset: &[RcInstance],
    params: &RcParams,
    mode: RcMode,
    lookup: Option<&dyn KgeLookup>,
) -> Result<MetricsReport> {
    let mut pairs = Vec::with_capacity(dataset.len());
    for inst in dataset {
        let gold = inst
            .label
            .ok_or_else(|| Error::Validation(format!("instance {} has no label", inst.id)))?;
        let p = forward(inst, params, mode, lookup)?;
        pairs.push((gold, argmax(&p)));
    }
    Ok(MetricsReport::from_pairs(&pairs))
}

/// Writes `instance_id<TAB>predicted_label<TAB>p1,...,p5` lines.
pub fn write_predictions<W: Write>(
    dataset: &[RcInstance],
    params: &RcParams,
    mode: RcMode,
    lookup: Option<&dyn KgeLookup>,
    mut sink: W,
) -> Result<usize> {
    for inst in dataset {
        let p = forward(inst, params, mode, lookup)?;
        let probs: Vec<String> = p.iter().map(|v| format!("{v:.6}")).collect();
        writeln!(sink, "{}\t{}\t{}", inst.id, argmax(&p), probs.join(","))?;
    }
    sink.flush()?;
    Ok(dataset.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use RcLabel::*;

    #[test]
    fn hand_confusion_matrix() {
        let r = MetricsReport::from_pairs(&[(Advice, Advice), (Advice, Effect), (Effect, Effect), (Effect, Effect)]);
        assert_abs_diff_eq!(r.class(Advice).f1, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.class(Effect).f1, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(r.macro_f1, (2.0 / 3.0 + 0.8) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.micro_f1, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn perfect_predictions() {
        let pairs: Vec<_> = RcLabel::ALL.iter().map(|&l| (l, l)).collect();
        let r = MetricsReport::from_pairs(&pairs);
        assert!(r.per_class.iter().all(|m| m.f1 == 1.0));
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn always_other() {
        let pairs: Vec<_> = RcLabel::ALL.iter().map(|&l| (l, Other)).collect();
        let r = MetricsReport::from_pairs(&pairs);
        for l in RcLabel::POSITIVE {
            assert_eq!(r.class(l).f1, 0.0);
        }
        assert_eq!(r.macro_f1, 0.0);
        assert_eq!(r.micro_f1, 0.0);
    }

    #[test]
    fn empty_is_zero() {
        let r = MetricsReport::from_pairs(&[]);
        assert_eq!(r.macro_f1, 0.0);
        assert_eq!(r.accuracy, 0.0);
    }

    #[test]
    fn table_rows_in_report_order() {
        let text = MetricsReport::from_pairs(&[(Advice, Advice)]).to_string();
        let rows: Vec<&str> = text.lines().skip(1).map(|l| l.split_whitespace().next().unwrap()).collect();
        assert_eq!(rows, ["Advice", "Effect", "Mechanism", "Int", "macro", "micro", "accuracy"]);
    }
}
