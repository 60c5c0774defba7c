//! Seeded synthetic graphs and classification sets for tests, benchmarks and
//! shipped fixtures.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{EntityId, EntityKind, IndexedTriple, KnowledgeGraph, Schema, Vocabulary};
use crate::kge::DrugEmbedding;
use crate::rc::{RcInstance, RcLabel};

/// Generators draw from their own ChaCha stream so that a dataset built with
/// seed `s` is unrelated to a model initialized with the same seed.
fn rng_for(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(7);
    rng
}

fn unit_vector<R: Rng>(dim: usize, rng: &mut R) -> Array1<f64> {
    let u = Uniform::new_inclusive(-1.0, 1.0);
    loop {
        let v: Array1<f64> = Array1::from_shape_simple_fn(dim, || u.sample(rng));
        let n = v.dot(&v).sqrt();
        if n > 1e-6 {
            return v / n;
        }
    }
}

fn drug_vocab(n_drugs: usize, relations: &[String]) -> Vocabulary {
    let mut schema = Schema::new();
    for r in relations {
        schema.declare(r, EntityKind::Drug, EntityKind::Drug).expect("distinct names");
    }
    let mut vocab = Vocabulary::new(schema);
    for i in 0..n_drugs {
        vocab.add_entity(&format!("d{i}"), EntityKind::Drug).expect("fresh id");
    }
    vocab
}

/// Drugs `d0..` with drug-drug relations `rel0..`; triple
/// `(d_i, rel_j, d_{(i+1+j) mod n})` for every drug and relation.
pub fn drug_graph(n_drugs: usize, n_relations: usize) -> KnowledgeGraph {
    let relations: Vec<String> = (0..n_relations).map(|r| format!("rel{r}")).collect();
    let vocab = Arc::new(drug_vocab(n_drugs, &relations));
    let triples = (0..n_drugs).flat_map(|i| {
        (0..n_relations).map(move |j| IndexedTriple::new(i, j, (i + 1 + j) % n_drugs))
    });
    KnowledgeGraph::from_indexed(vocab, triples).expect("signatures hold")
}

/// Graph generated by a hidden TransE model: random unit entity vectors and
/// random relation vectors; for every head and relation the tail is the other
/// entity nearest to `head + relation`.
pub fn planted_transe_graph(n_entities: usize, n_relations: usize, dim: usize, seed: u64) -> KnowledgeGraph {
    let mut rng = rng_for(seed);
    let entities: Vec<Array1<f64>> = (0..n_entities).map(|_| unit_vector(dim, &mut rng)).collect();
    let relations: Vec<Array1<f64>> = (0..n_relations).map(|_| unit_vector(dim, &mut rng)).collect();
    let names: Vec<String> = (0..n_relations).map(|r| format!("rel{r}")).collect();
    let vocab = Arc::new(drug_vocab(n_entities, &names));
    let mut triples = Vec::new();
    for (h, eh) in entities.iter().enumerate() {
        for (r, er) in relations.iter().enumerate() {
            let target = eh + er;
            let tail = (0..n_entities)
                .filter(|&t| t != h)
                .min_by(|&a, &b| {
                    let da = (&target - &entities[a]).mapv(|v| v * v).sum();
                    let db = (&target - &entities[b]).mapv(|v| v * v).sum();
                    da.total_cmp(&db)
                })
                .expect("at least two entities");
            triples.push(IndexedTriple::new(h, r, tail));
        }
    }
    KnowledgeGraph::from_indexed(vocab, triples).expect("signatures hold")
}

fn noise_hidden<R: Rng>(rows: usize, dim: usize, scale: f64, rng: &mut R) -> Array2<f64> {
    let u = Uniform::new_inclusive(-scale, scale);
    Array2::from_shape_simple_fn((rows, dim), || u.sample(rng))
}

/// Linearly separable classification set: every hidden row of an instance is
/// its class prototype plus small noise, and each class has its own drug whose
/// KG vector is a distinct prototype. Returns instances and the drug vectors.
pub fn separable_instances(
    n: usize,
    dim: usize,
    kg_dim: usize,
    seed: u64,
) -> (Vec<RcInstance>, Vec<DrugEmbedding>) {
    let mut rng = rng_for(seed);
    let protos: Vec<Array1<f64>> = (0..RcLabel::COUNT).map(|_| unit_vector(dim, &mut rng) * 2.0).collect();
    let kg_protos: Vec<Array1<f64>> = (0..RcLabel::COUNT).map(|_| unit_vector(kg_dim, &mut rng)).collect();
    let seq_len = 6;
    let instances = (0..n)
        .map(|i| {
            let c = i % RcLabel::COUNT;
            let mut hidden = noise_hidden(seq_len, dim, 0.1, &mut rng);
            for mut row in hidden.rows_mut() {
                row += &protos[c];
            }
            RcInstance {
                id: format!("sep{i}"),
                hidden,
                span1: (1, 2),
                span2: (3, 4),
                drug1: Some(EntityId::new(&format!("k{c}")).expect("non-empty")),
                drug2: Some(EntityId::new(&format!("k{}", (c + 1) % RcLabel::COUNT)).expect("non-empty")),
                mention1: format!("drug{c}"),
                mention2: format!("drug{}", (c + 1) % RcLabel::COUNT),
                label: RcLabel::from_index(c),
            }
        })
        .collect();
    let embeddings = kg_protos
        .into_iter()
        .enumerate()
        .map(|(c, v)| DrugEmbedding {
            entity: EntityId::new(&format!("k{c}")).expect("non-empty"),
            vector: v.to_vec(),
        })
        .collect();
    (instances, embeddings)
}

/// A classification task whose label is fixed by the KG relation linking the
/// drug pair, while the text features are label-independent noise.
#[derive(Debug, Clone)]
pub struct FusionTask {
    pub graph: KnowledgeGraph,
    pub train: Vec<RcInstance>,
    pub test: Vec<RcInstance>,
}

/// Relation name used by [`fusion_task`] for a label.
pub fn interaction_relation(label: RcLabel) -> String {
    format!("ddi-{}", label.as_str().to_lowercase())
}

/// Builds a [`FusionTask`].
///
/// Each drug has a hidden type that selects one of the five labels. A drug of
/// type `c` targets protein `t_c` and interacts with `partners` random drugs
/// through relation `ddi-<label c>`. Every such interaction becomes one
/// instance labelled `c`; a `test_fraction` of them is held out.
pub fn fusion_task(
    drugs_per_type: usize,
    partners: usize,
    hidden_dim: usize,
    test_fraction: f64,
    seed: u64,
) -> FusionTask {
    let mut rng = rng_for(seed);
    let mut schema = Schema::new();
    schema
        .declare("drug-target", EntityKind::Drug, EntityKind::Target)
        .expect("fresh");
    for label in RcLabel::ALL {
        schema
            .declare(&interaction_relation(label), EntityKind::Drug, EntityKind::Drug)
            .expect("fresh");
    }
    let mut vocab = Vocabulary::new(schema);
    let n_drugs = drugs_per_type * RcLabel::COUNT;
    let mut drug_type = Vec::with_capacity(n_drugs);
    for i in 0..n_drugs {
        vocab.add_entity(&format!("DB{i:04}"), EntityKind::Drug).expect("fresh");
        drug_type.push(i % RcLabel::COUNT);
    }
    let targets: Vec<usize> = (0..RcLabel::COUNT)
        .map(|c| vocab.add_entity(&format!("T{c}"), EntityKind::Target).expect("fresh"))
        .collect();
    let vocab = Arc::new(vocab);
    let drug_target = 0;

    let mut triples = Vec::new();
    let mut pairs = Vec::new();
    for d1 in 0..n_drugs {
        let c = drug_type[d1];
        triples.push(IndexedTriple::new(d1, drug_target, targets[c]));
        let mut others: Vec<usize> = (0..n_drugs).filter(|&d| d != d1).collect();
        others.shuffle(&mut rng);
        for &d2 in others.iter().take(partners) {
            triples.push(IndexedTriple::new(d1, 1 + c, d2));
            pairs.push((d1, d2, c));
        }
    }
    let graph = KnowledgeGraph::from_indexed(vocab.clone(), triples).expect("signatures hold");

    pairs.shuffle(&mut rng);
    let n_test = ((pairs.len() as f64) * test_fraction).round() as usize;
    let seq_len = 8;
    let mut make = |(d1, d2, c): (usize, usize, usize), i: usize| RcInstance {
        id: format!("pair{i:04}"),
        hidden: noise_hidden(seq_len, hidden_dim, 1.0, &mut rng),
        span1: (1, 2),
        span2: (4, 6),
        drug1: Some(vocab.entity(d1).clone()),
        drug2: Some(vocab.entity(d2).clone()),
        mention1: vocab.entity(d1).to_string(),
        mention2: vocab.entity(d2).to_string(),
        label: RcLabel::from_index(c),
    };
    let mut instances: Vec<RcInstance> = pairs.iter().enumerate().map(|(i, &p)| make(p, i)).collect();
    let train = instances.split_off(n_test);
    FusionTask {
        graph,
        train,
        test: instances,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_graph_shape() {
        let g = planted_transe_graph(20, 2, 16, 3);
        assert_eq!(g.len(), 40);
        assert!(g.triples().iter().all(|t| t.head != t.tail));
        assert_eq!(g.triples(), planted_transe_graph(20, 2, 16, 3).triples());
    }

    #[test]
    fn fusion_labels_follow_relations() {
        let task = fusion_task(4, 3, 8, 0.25, 1);
        assert_eq!(task.train.len() + task.test.len(), 60);
        assert_eq!(task.test.len(), 15);
        for inst in task.train.iter().chain(&task.test) {
            let rel = interaction_relation(inst.label.unwrap());
            let t = crate::graph::Triple {
                head: inst.drug1.clone().unwrap(),
                relation: crate::graph::RelationKind::new(&rel).unwrap(),
                tail: inst.drug2.clone().unwrap(),
            };
            assert!(task.graph.contains(&t).unwrap());
            inst.validate(300).unwrap();
        }
    }

    #[test]
    fn separable_set_is_valid() {
        let (insts, embs) = separable_instances(50, 8, 4, 0);
        assert_eq!(insts.len(), 50);
        assert_eq!(embs.len(), 5);
        insts.iter().for_each(|i| i.validate(300).unwrap());
    }
}
