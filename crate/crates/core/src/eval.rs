//! Link-prediction ranking and the `embeddings.tsv` exchange format.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{EntityId, IndexedTriple, KnowledgeGraph};
use crate::kge::{DrugEmbedding, KgeParams};

pub const HITS_AT: [usize; 3] = [1, 3, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMode {
    Raw,
    Filtered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkPredictionReport {
    pub mrr: f64,
    pub hits_at: BTreeMap<usize, f64>,
    pub n_queries: usize,
    pub mode: RankMode,
}

impl LinkPredictionReport {
    pub fn hits(&self, k: usize) -> f64 {
        self.hits_at.get(&k).copied().unwrap_or(0.0)
    }

    /// `key=value` lines for machine consumption.
    pub fn write_key_values<W: Write>(&self, mut w: W) -> Result<()> {
        let mode = match self.mode {
            RankMode::Raw => "raw",
            RankMode::Filtered => "filtered",
        };
        writeln!(w, "mode={mode}")?;
        writeln!(w, "n_queries={}", self.n_queries)?;
        writeln!(w, "mrr={}", self.mrr)?;
        for (k, v) in &self.hits_at {
            writeln!(w, "hits@{k}={v}")?;
        }
        Ok(())
    }
}

impl fmt::Display for LinkPredictionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            RankMode::Raw => "raw",
            RankMode::Filtered => "filtered",
        };
        writeln!(f, "{:<10} {:>10}", "mode", mode)?;
        writeln!(f, "{:<10} {:>10}", "queries", self.n_queries)?;
        writeln!(f, "{:<10} {:>10.6}", "MRR", self.mrr)?;
        let mut first = true;
        for (k, v) in &self.hits_at {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "{:<10} {:>10.6}", format!("Hits@{k}"), v)?;
        }
        Ok(())
    }
}

/// Rank of the true entity among same-kind candidates when the head
/// (`replace_head`) or the tail is replaced; ties get the mean rank of the
/// tied block.
pub fn query_rank(
    params: &KgeParams,
    test: IndexedTriple,
    replace_head: bool,
    all: &KnowledgeGraph,
    mode: RankMode,
) -> Result<f64> {
    params.score_indexed(test)?;
    if params.num_entities() != all.vocab().num_entities() {
        return Err(Error::Shape("parameters and reference graph disagree on entity count".into()));
    }
    Ok(rank_unchecked(params, test, replace_head, all, mode))
}

fn rank_unchecked(
    params: &KgeParams,
    test: IndexedTriple,
    replace_head: bool,
    all: &KnowledgeGraph,
    mode: RankMode,
) -> f64 {
    let vocab = all.vocab();
    let orientation = params.model.orientation();
    let true_score = params.score_unchecked(test);
    let slot = if replace_head { test.head } else { test.tail };
    let mut better = 0usize;
    let mut tied = 0usize;
    for &e in vocab.entities_of_kind(vocab.entity_kind(slot)) {
        if e == slot {
            continue;
        }
        let candidate = if replace_head {
            IndexedTriple { head: e, ..test }
        } else {
            IndexedTriple { tail: e, ..test }
        };
        if mode == RankMode::Filtered && all.contains_indexed(candidate) {
            continue;
        }
        let s = params.score_unchecked(candidate);
        if orientation.better(s, true_score) {
            better += 1;
        } else if s == true_score {
            tied += 1;
        }
    }
    // ranks better+1 ..= better+tied+1 averaged
    better as f64 + 1.0 + tied as f64 / 2.0
}

/// Head and tail link prediction over every test triple.
pub fn rank_triples(
    params: &KgeParams,
    test: &KnowledgeGraph,
    all: &KnowledgeGraph,
    mode: RankMode,
) -> Result<LinkPredictionReport> {
    let mut hits_at: BTreeMap<usize, f64> = HITS_AT.iter().map(|&k| (k, 0.0)).collect();
    if test.is_empty() {
        return Ok(LinkPredictionReport {
            mrr: 0.0,
            hits_at,
            n_queries: 0,
            mode,
        });
    }
    if test.vocab().num_entities() != all.vocab().num_entities()
        || params.num_entities() != all.vocab().num_entities()
        || params.num_relations() != all.vocab().num_relations()
    {
        return Err(Error::Shape(
            "test graph, reference graph and parameters must share one vocabulary".into(),
        ));
    }
    let mut reciprocal_sum = 0.0;
    let mut n_queries = 0usize;
    for &t in test.triples() {
        params.score_indexed(t)?;
        for replace_head in [true, false] {
            let rank = rank_unchecked(params, t, replace_head, all, mode);
            reciprocal_sum += 1.0 / rank;
            for (&k, hits) in hits_at.iter_mut() {
                if rank <= k as f64 {
                    *hits += 1.0;
                }
            }
            n_queries += 1;
        }
    }
    let n = n_queries as f64;
    for v in hits_at.values_mut() {
        *v /= n;
    }
    Ok(LinkPredictionReport {
        mrr: reciprocal_sum / n,
        hits_at,
        n_queries,
        mode,
    })
}

/// Writes `entity_id<TAB>v1 v2 ... vd` lines using shortest round-trip float
/// formatting. Returns the number of rows written.
pub fn export_embeddings<W: Write>(embeddings: &[DrugEmbedding], mut sink: W) -> Result<usize> {
    if let Some(first) = embeddings.first() {
        let d = first.vector.len();
        if let Some(bad) = embeddings.iter().find(|e| e.vector.len() != d) {
            return Err(Error::Shape(format!(
                "embedding for {} has dimension {}, expected {d}",
                bad.entity,
                bad.vector.len()
            )));
        }
    }
    for e in embeddings {
        write!(sink, "{}", e.entity)?;
        for (i, v) in e.vector.iter().enumerate() {
            let sep = if i == 0 { '\t' } else { ' ' };
            write!(sink, "{sep}{v}")?;
        }
        writeln!(sink)?;
    }
    sink.flush()?;
    Ok(embeddings.len())
}

/// Reads an `embeddings.tsv` source. Any whitespace separates fields.
pub fn import_embeddings<R: BufRead>(source: R, source_name: &str) -> Result<Vec<DrugEmbedding>> {
    let mut out: Vec<DrugEmbedding> = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let id = fields.next().expect("non-blank line has a field");
        let vector = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::parse(source_name, lineno, format!("bad float `{f}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if vector.is_empty() {
            return Err(Error::parse(source_name, lineno, "no vector components"));
        }
        if let Some(first) = out.first() {
            if first.vector.len() != vector.len() {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("dimension {} differs from {}", vector.len(), first.vector.len()),
                ));
            }
        }
        out.push(DrugEmbedding {
            entity: EntityId::new(id)?,
            vector,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kge::{init_params, KgeConfig, KgeModel};
    use ndarray::{array, Array2};
    use std::sync::Arc;

    fn two_drug_graph() -> KnowledgeGraph {
        let types = "@relation\tr\tdrug\tdrug\nA\tdrug\nB\tdrug\n";
        KnowledgeGraph::load("A\tr\tB\n".as_bytes(), types.as_bytes()).unwrap()
    }

    #[test]
    fn perfect_model_ranks_first() {
        let g = two_drug_graph();
        let mut p = init_params(&KgeConfig { dim: 2, ..KgeConfig::new(KgeModel::TransE) }, &g, 0);
        p.entities = array![[0.0, 0.0], [1.0, 0.0]];
        p.relations = array![[1.0, 0.0]];
        let r = rank_triples(&p, &g, &g, RankMode::Raw).unwrap();
        assert_eq!(r.n_queries, 2);
        assert_eq!(r.mrr, 1.0);
        assert_eq!(r.hits(1), 1.0);
    }

    #[test]
    fn all_tied_takes_mean_rank() {
        let types = "@relation\tr\tdrug\tdrug\nA\tdrug\nB\tdrug\nC\tdrug\nD\tdrug\nE\tdrug\n";
        let g = KnowledgeGraph::load("A\tr\tB\n".as_bytes(), types.as_bytes()).unwrap();
        let mut p = init_params(&KgeConfig { dim: 3, ..KgeConfig::new(KgeModel::DistMult) }, &g, 0);
        p.entities = Array2::zeros((5, 3));
        let r = rank_triples(&p, &g, &g, RankMode::Raw).unwrap();
        assert!((r.mrr - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.hits(1), 0.0);
        assert_eq!(r.hits(3), 1.0);
    }

    #[test]
    fn empty_test_set() {
        let g = two_drug_graph();
        let p = init_params(&KgeConfig { dim: 2, ..Default::default() }, &g, 0);
        let empty = KnowledgeGraph::empty(Arc::clone(g.vocab()));
        let r = rank_triples(&p, &empty, &g, RankMode::Filtered).unwrap();
        assert_eq!(r.n_queries, 0);
        assert_eq!(r.mrr, 0.0);
    }

    #[test]
    fn export_shapes() {
        let e = |id: &str, v: Vec<f64>| DrugEmbedding { entity: EntityId::new(id).unwrap(), vector: v };
        let mut buf = Vec::new();
        assert_eq!(export_embeddings(&[], &mut buf).unwrap(), 0);
        assert!(buf.is_empty());
        let rows = vec![
            e("DB1", vec![0.1, -2.0, 3.5e-9, 4.0]),
            e("DB2", vec![1.0, 2.0, 3.0, 4.0]),
            e("DB3", vec![0.0, 0.0, 0.0, 1.0 / 3.0]),
        ];
        assert_eq!(export_embeddings(&rows, &mut buf).unwrap(), 3);
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l.split_whitespace().count() == 5));
        let back = import_embeddings(buf.as_slice(), "mem").unwrap();
        assert_eq!(back, rows);
        assert!(export_embeddings(&[rows[0].clone(), e("X", vec![1.0])], Vec::new()).is_err());
    }

    #[test]
    fn import_rejects_ragged_rows() {
        let err = import_embeddings("A\t1 2\nB\t1\n".as_bytes(), "e.tsv").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }
}
