//! Typed heterogeneous knowledge graph: drugs, targets and diseases connected by
//! relations whose head/tail kinds are fixed by a declared signature.
//!
//! Two line-oriented inputs feed a graph. `triples.tsv` holds
//! `head<TAB>relation<TAB>tail` lines, and `entity_types.tsv` holds
//! `entity<TAB>kind` lines. The types file may also declare relation signatures
//! with `@relation<TAB>name<TAB>head_kind<TAB>tail_kind`; when it declares none,
//! the five-relation biomedical profile from [`Schema::bio_kg`] applies. Lines
//! starting with `#` and blank lines are ignored in both files.

use std::borrow::Borrow;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a graph entity, e.g. a DrugBank-style accession.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EntityId(Arc<str>);

impl EntityId {
    pub fn new(value: &str) -> Result<Self> {
        if value.is_empty() {
            return Err(Error::Validation("entity id must be non-empty".into()));
        }
        Ok(EntityId(Arc::from(value)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for EntityId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        EntityId::new(&value)
    }
}

impl From<EntityId> for String {
    fn from(id: EntityId) -> String {
        id.0.to_string()
    }
}

impl Borrow<str> for EntityId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityKind {
    Drug,
    Target,
    Disease,
}

impl EntityKind {
    pub const ALL: [EntityKind; 3] = [EntityKind::Drug, EntityKind::Target, EntityKind::Disease];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Drug => "drug",
            EntityKind::Target => "target",
            EntityKind::Disease => "disease",
        }
    }
}

impl FromStr for EntityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "drug" => Ok(EntityKind::Drug),
            "target" => Ok(EntityKind::Target),
            "disease" => Ok(EntityKind::Disease),
            other => Err(Error::Schema(format!("unknown entity kind `{other}`"))),
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EntityKind::Drug => "Drug",
            EntityKind::Target => "Target",
            EntityKind::Disease => "Disease",
        };
        f.write_str(name)
    }
}

/// Name of a relation type declared in a [`Schema`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationKind(Arc<str>);

impl RelationKind {
    pub fn new(value: &str) -> Result<Self> {
        if value.is_empty() {
            return Err(Error::Validation("relation name must be non-empty".into()));
        }
        Ok(RelationKind(Arc::from(value)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for RelationKind {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub head: EntityId,
    pub relation: RelationKind,
    pub tail: EntityId,
}

impl Triple {
    pub fn new(head: &str, relation: &str, tail: &str) -> Result<Self> {
        Ok(Triple {
            head: EntityId::new(head)?,
            relation: RelationKind::new(relation)?,
            tail: EntityId::new(tail)?,
        })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.head, self.relation, self.tail)
    }
}

/// A triple over dense vocabulary indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexedTriple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

impl IndexedTriple {
    pub fn new(head: usize, relation: usize, tail: usize) -> Self {
        IndexedTriple {
            head,
            relation,
            tail,
        }
    }
}

/// Relation vocabulary with the allowed (head kind, tail kind) per relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    relations: Vec<(String, EntityKind, EntityKind)>,
}

impl Schema {
    pub fn new() -> Self {
        Schema {
            relations: Vec::new(),
        }
    }

    /// The five relation kinds of the curated drug/target/disease graph.
    pub fn bio_kg() -> Self {
        use EntityKind::*;
        let mut schema = Schema::new();
        for (name, head, tail) in [
            ("drug-target", Drug, Target),
            ("target-target", Target, Target),
            ("drug-disease", Drug, Disease),
            ("disease-disease", Disease, Disease),
            ("disease-target", Disease, Target),
        ] {
            schema
                .declare(name, head, tail)
                .expect("default profile is consistent");
        }
        schema
    }

    /// Adds a relation. Re-declaring an identical signature is a no-op.
    pub fn declare(&mut self, name: &str, head: EntityKind, tail: EntityKind) -> Result<()> {
        if name.is_empty() {
            return Err(Error::Schema("relation name must be non-empty".into()));
        }
        match self.relations.iter().find(|(n, _, _)| n == name) {
            Some((_, h, t)) if (*h, *t) == (head, tail) => Ok(()),
            Some((_, h, t)) => Err(Error::Schema(format!(
                "relation `{name}` declared twice with signatures {h}->{t} and {head}->{tail}"
            ))),
            None => {
                self.relations.push((name.to_string(), head, tail));
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, EntityKind, EntityKind)> {
        self.relations.iter().map(|(n, h, t)| (n.as_str(), *h, *t))
    }
}

impl Default for Schema {
    fn default() -> Self {
        Schema::bio_kg()
    }
}

/// Entity and relation vocabularies with dense indices. Shared between a graph
/// and the splits derived from it so that indices agree.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    entities: Vec<EntityId>,
    kinds: Vec<EntityKind>,
    entity_index: HashMap<EntityId, usize>,
    by_kind: [Vec<usize>; 3],
    relations: Vec<RelationKind>,
    signatures: Vec<(EntityKind, EntityKind)>,
    relation_index: HashMap<RelationKind, usize>,
    schema: Schema,
}

impl Vocabulary {
    pub fn new(schema: Schema) -> Self {
        let mut relations = Vec::new();
        let mut signatures = Vec::new();
        let mut relation_index = HashMap::new();
        for (i, (name, head, tail)) in schema.relations().enumerate() {
            let kind = RelationKind(Arc::from(name));
            relation_index.insert(kind.clone(), i);
            relations.push(kind);
            signatures.push((head, tail));
        }
        Vocabulary {
            entities: Vec::new(),
            kinds: Vec::new(),
            entity_index: HashMap::new(),
            by_kind: Default::default(),
            relations,
            signatures,
            relation_index,
            schema,
        }
    }

    /// Registers an entity, returning its index. Conflicting kinds are a schema error.
    pub fn add_entity(&mut self, id: &str, kind: EntityKind) -> Result<usize> {
        if let Some(&idx) = self.entity_index.get(id) {
            if self.kinds[idx] != kind {
                return Err(Error::Schema(format!(
                    "entity `{id}` typed both {} and {kind}",
                    self.kinds[idx]
                )));
            }
            return Ok(idx);
        }
        let entity = EntityId::new(id)?;
        let idx = self.entities.len();
        self.entity_index.insert(entity.clone(), idx);
        self.entities.push(entity);
        self.kinds.push(kind);
        self.by_kind[kind.index()].push(idx);
        Ok(idx)
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn entity_index(&self, id: &str) -> Option<usize> {
        self.entity_index.get(id).copied()
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relation_index.get(name).copied()
    }

    pub fn entity(&self, idx: usize) -> &EntityId {
        &self.entities[idx]
    }

    pub fn entity_kind(&self, idx: usize) -> EntityKind {
        self.kinds[idx]
    }

    pub fn relation(&self, idx: usize) -> &RelationKind {
        &self.relations[idx]
    }

    pub fn signature(&self, relation: usize) -> (EntityKind, EntityKind) {
        self.signatures[relation]
    }

    /// Entity indices of one kind, in registration order.
    pub fn entities_of_kind(&self, kind: EntityKind) -> &[usize] {
        &self.by_kind[kind.index()]
    }

    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn index_triple(&self, triple: &Triple) -> Result<IndexedTriple> {
        let head = self
            .entity_index(triple.head.as_str())
            .ok_or_else(|| Error::Lookup(format!("unregistered entity `{}`", triple.head)))?;
        let tail = self
            .entity_index(triple.tail.as_str())
            .ok_or_else(|| Error::Lookup(format!("unregistered entity `{}`", triple.tail)))?;
        let relation = self
            .relation_index(triple.relation.as_str())
            .ok_or_else(|| Error::Lookup(format!("unregistered relation `{}`", triple.relation)))?;
        Ok(IndexedTriple::new(head, relation, tail))
    }

    pub fn triple(&self, t: IndexedTriple) -> Triple {
        Triple {
            head: self.entities[t.head].clone(),
            relation: self.relations[t.relation].clone(),
            tail: self.entities[t.tail].clone(),
        }
    }

    pub fn check_signature(&self, t: IndexedTriple) -> Result<()> {
        let (head_kind, tail_kind) = self.signatures[t.relation];
        if self.kinds[t.head] != head_kind || self.kinds[t.tail] != tail_kind {
            return Err(Error::Validation(format!(
                "triple {} violates signature {}->{} of relation `{}` (got {}->{})",
                self.triple(t),
                head_kind,
                tail_kind,
                self.relations[t.relation],
                self.kinds[t.head],
                self.kinds[t.tail],
            )));
        }
        Ok(())
    }

    /// Parses an `entity_types.tsv` source, including `@relation` declarations.
    pub fn parse_types<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut schema = Schema::new();
        let mut typed = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            if is_skippable(&line) {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields[0] == "@relation" {
                if fields.len() != 4 {
                    return Err(Error::parse(
                        source_name,
                        lineno,
                        format!(
                            "expected `@relation<TAB>name<TAB>head_kind<TAB>tail_kind`, got {} fields",
                            fields.len()
                        ),
                    ));
                }
                let head = fields[2].parse().map_err(|e| at_line(e, source_name, lineno))?;
                let tail = fields[3].parse().map_err(|e| at_line(e, source_name, lineno))?;
                schema.declare(fields[1], head, tail)?;
                continue;
            }
            if fields.len() != 2 {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("expected `entity<TAB>kind`, got {} fields", fields.len()),
                ));
            }
            if fields[0].is_empty() {
                return Err(Error::parse(source_name, lineno, "empty entity id"));
            }
            let kind: EntityKind = fields[1].parse().map_err(|e| at_line(e, source_name, lineno))?;
            typed.push((fields[0].to_string(), kind));
        }
        if schema.is_empty() {
            schema = Schema::bio_kg();
        }
        let mut vocab = Vocabulary::new(schema);
        for (id, kind) in typed {
            vocab.add_entity(&id, kind)?;
        }
        Ok(vocab)
    }

    /// Writes the vocabulary back in `entity_types.tsv` form.
    pub fn write_types<W: Write>(&self, mut w: W) -> Result<()> {
        for (name, head, tail) in self.schema.relations() {
            writeln!(w, "@relation\t{name}\t{}\t{}", head.as_str(), tail.as_str())?;
        }
        for (id, kind) in self.entities.iter().zip(&self.kinds) {
            writeln!(w, "{id}\t{}", kind.as_str())?;
        }
        Ok(())
    }
}

fn is_skippable(line: &str) -> bool {
    line.trim().is_empty() || line.starts_with('#')
}

fn at_line(err: Error, source_name: &str, line: usize) -> Error {
    Error::parse(source_name, line, err.to_string())
}

/// Immutable knowledge graph: a vocabulary plus a duplicate-free ordered triple list.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    vocab: Arc<Vocabulary>,
    triples: Vec<IndexedTriple>,
    triple_set: HashSet<IndexedTriple>,
    duplicates_collapsed: usize,
}

impl KnowledgeGraph {
    /// Builds a graph over `vocab`, validating every triple against its signature.
    pub fn from_indexed(
        vocab: Arc<Vocabulary>,
        triples: impl IntoIterator<Item = IndexedTriple>,
    ) -> Result<Self> {
        let mut graph = KnowledgeGraph {
            vocab,
            triples: Vec::new(),
            triple_set: HashSet::new(),
            duplicates_collapsed: 0,
        };
        for t in triples {
            if t.head >= graph.vocab.num_entities()
                || t.tail >= graph.vocab.num_entities()
                || t.relation >= graph.vocab.num_relations()
            {
                return Err(Error::Lookup(format!("triple {t:?} outside vocabulary")));
            }
            graph.vocab.check_signature(t)?;
            graph.push(t);
        }
        Ok(graph)
    }

    pub fn empty(vocab: Arc<Vocabulary>) -> Self {
        KnowledgeGraph {
            vocab,
            triples: Vec::new(),
            triple_set: HashSet::new(),
            duplicates_collapsed: 0,
        }
    }

    fn push(&mut self, t: IndexedTriple) {
        if self.triple_set.insert(t) {
            self.triples.push(t);
        } else {
            self.duplicates_collapsed += 1;
        }
    }

    /// Loads `triples.tsv` and `entity_types.tsv` sources.
    pub fn load<R1: BufRead, R2: BufRead>(triples: R1, types: R2) -> Result<Self> {
        Self::load_named(triples, "triples", types, "types")
    }

    pub fn load_named<R1: BufRead, R2: BufRead>(
        triples: R1,
        triples_name: &str,
        types: R2,
        types_name: &str,
    ) -> Result<Self> {
        let vocab = Arc::new(Vocabulary::parse_types(types, types_name)?);
        Self::load_with_vocab(triples, triples_name, vocab)
    }

    /// Loads triples against an existing vocabulary (e.g. a held-out test file).
    pub fn load_with_vocab<R: BufRead>(
        triples: R,
        source_name: &str,
        vocab: Arc<Vocabulary>,
    ) -> Result<Self> {
        let mut graph = KnowledgeGraph::empty(vocab);
        for (lineno, line) in triples.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            if is_skippable(&line) {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!(
                        "expected `head<TAB>relation<TAB>tail`, got {} fields",
                        fields.len()
                    ),
                ));
            }
            let vocab = &graph.vocab;
            let head = vocab.entity_index(fields[0]).ok_or_else(|| {
                Error::Validation(format!(
                    "{source_name}:{lineno}: entity `{}` has no declared type",
                    fields[0]
                ))
            })?;
            let relation = vocab.relation_index(fields[1]).ok_or_else(|| {
                Error::Validation(format!(
                    "{source_name}:{lineno}: relation `{}` is not declared",
                    fields[1]
                ))
            })?;
            let tail = vocab.entity_index(fields[2]).ok_or_else(|| {
                Error::Validation(format!(
                    "{source_name}:{lineno}: entity `{}` has no declared type",
                    fields[2]
                ))
            })?;
            let t = IndexedTriple::new(head, relation, tail);
            vocab
                .check_signature(t)
                .map_err(|e| Error::Validation(format!("{source_name}:{lineno}: {e}")))?;
            graph.push(t);
        }
        if graph.duplicates_collapsed > 0 {
            log::warn!(
                "{source_name}: collapsed {} duplicate triple(s)",
                graph.duplicates_collapsed
            );
        }
        Ok(graph)
    }

    pub fn from_files(triples: &Path, types: &Path) -> Result<Self> {
        let vocab = Arc::new(Vocabulary::parse_types(
            BufReader::new(File::open(types)?),
            &types.display().to_string(),
        )?);
        Self::load_with_vocab(
            BufReader::new(File::open(triples)?),
            &triples.display().to_string(),
            vocab,
        )
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn triples(&self) -> &[IndexedTriple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn duplicates_collapsed(&self) -> usize {
        self.duplicates_collapsed
    }

    pub fn contains_indexed(&self, t: IndexedTriple) -> bool {
        self.triple_set.contains(&t)
    }

    /// Membership test; unregistered ids are a lookup error.
    pub fn contains(&self, triple: &Triple) -> Result<bool> {
        let t = self.vocab.index_triple(triple)?;
        Ok(self.contains_indexed(t))
    }

    pub fn write_triples<W: Write>(&self, mut w: W) -> Result<()> {
        for t in &self.triples {
            writeln!(
                w,
                "{}\t{}\t{}",
                self.vocab.entity(t.head),
                self.vocab.relation(t.relation),
                self.vocab.entity(t.tail)
            )?;
        }
        Ok(())
    }

    pub fn stats(&self) -> KgStats {
        let mut nodes = [0usize; 3];
        for kind in EntityKind::ALL {
            nodes[kind.index()] = self.vocab.entities_of_kind(kind).len();
        }
        let mut edge_counts = vec![0usize; self.vocab.num_relations()];
        let mut self_loops = 0;
        for t in &self.triples {
            edge_counts[t.relation] += 1;
            if t.head == t.tail {
                self_loops += 1;
            }
        }
        KgStats {
            nodes: EntityKind::ALL.iter().map(|&k| (k, nodes[k.index()])).collect(),
            edges: (0..self.vocab.num_relations())
                .map(|r| (self.vocab.relation(r).clone(), edge_counts[r]))
                .collect(),
            self_loops,
            total_nodes: nodes.iter().sum(),
            total_edges: edge_counts.iter().sum(),
        }
    }

    /// Seeded train/valid/test partition of the triple list.
    ///
    /// Valid/test triples mentioning an entity that does not occur in train are
    /// moved to train. Each part keeps the input order.
    pub fn split(&self, fractions: (f64, f64, f64), seed: u64) -> Result<GraphSplit> {
        let (ft, fv, fs) = fractions;
        if [ft, fv, fs].iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::Argument(format!(
                "split fractions must be non-negative, got {fractions:?}"
            )));
        }
        if ((ft + fv + fs) - 1.0).abs() > 1e-9 {
            return Err(Error::Argument(format!(
                "split fractions must sum to 1, got {fractions:?}"
            )));
        }
        let n = self.triples.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

        let n_train = ((ft * n as f64).round() as usize).min(n);
        let n_valid = ((fv * n as f64).round() as usize).min(n - n_train);
        let planned = (n_train, n_valid, n - n_train - n_valid);

        let mut train_idx: Vec<usize> = order[..n_train].to_vec();
        let mut covered: HashSet<usize> = HashSet::new();
        for &i in &train_idx {
            covered.insert(self.triples[i].head);
            covered.insert(self.triples[i].tail);
        }
        let mut reassigned = 0;
        let mut keep = |part: &[usize], train_idx: &mut Vec<usize>| -> Vec<usize> {
            let mut kept = Vec::new();
            for &i in part {
                let t = self.triples[i];
                if covered.contains(&t.head) && covered.contains(&t.tail) {
                    kept.push(i);
                } else {
                    covered.insert(t.head);
                    covered.insert(t.tail);
                    train_idx.push(i);
                    reassigned += 1;
                }
            }
            kept
        };
        let mut valid_idx = keep(&order[n_train..n_train + n_valid], &mut train_idx);
        let mut test_idx = keep(&order[n_train + n_valid..], &mut train_idx);

        for (name, frac, part) in [("train", ft, &train_idx), ("valid", fv, &valid_idx), ("test", fs, &test_idx)] {
            if frac > 0.0 && part.is_empty() {
                return Err(Error::Split(format!(
                    "{n} triple(s) cannot honor a {name} fraction of {frac} after entity-coverage reassignment"
                )));
            }
        }
        train_idx.sort_unstable();
        valid_idx.sort_unstable();
        test_idx.sort_unstable();
        let part = |idx: &[usize]| {
            let mut g = KnowledgeGraph::empty(self.vocab.clone());
            for &i in idx {
                g.push(self.triples[i]);
            }
            g
        };
        Ok(GraphSplit {
            train: part(&train_idx),
            valid: part(&valid_idx),
            test: part(&test_idx),
            planned,
            reassigned,
        })
    }
}

#[derive(Debug, Clone)]
pub struct GraphSplit {
    pub train: KnowledgeGraph,
    pub valid: KnowledgeGraph,
    pub test: KnowledgeGraph,
    /// Part sizes before entity-coverage reassignment.
    pub planned: (usize, usize, usize),
    /// Number of triples moved from valid/test into train.
    pub reassigned: usize,
}

/// Node counts per kind and edge counts per relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KgStats {
    pub nodes: Vec<(EntityKind, usize)>,
    pub edges: Vec<(RelationKind, usize)>,
    pub self_loops: usize,
    pub total_nodes: usize,
    pub total_edges: usize,
}

impl KgStats {
    pub fn node_count(&self, kind: EntityKind) -> usize {
        self.nodes
            .iter()
            .find(|(k, _)| *k == kind)
            .map_or(0, |(_, c)| *c)
    }

    pub fn edge_count(&self, relation: &str) -> usize {
        self.edges
            .iter()
            .find(|(r, _)| r.as_str() == relation)
            .map_or(0, |(_, c)| *c)
    }
}

impl fmt::Display for KgStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.nodes.len().max(self.edges.len());
        let node_w = self
            .nodes
            .iter()
            .map(|(k, _)| k.to_string().len())
            .chain(["Node Types".len(), "Total Nodes".len()])
            .max()
            .unwrap_or(0);
        let edge_w = self
            .edges
            .iter()
            .map(|(r, _)| r.as_str().len())
            .chain(["Edge Types".len(), "Total Edges".len()])
            .max()
            .unwrap_or(0);
        writeln!(
            f,
            "{:<node_w$}  {:>8}  |  {:<edge_w$}  {:>8}",
            "Node Types", "Count", "Edge Types", "Count"
        )?;
        for i in 0..rows {
            let (nk, nc) = match self.nodes.get(i) {
                Some((k, c)) => (k.to_string(), c.to_string()),
                None => (String::new(), String::new()),
            };
            let (ek, ec) = match self.edges.get(i) {
                Some((r, c)) => (r.to_string(), c.to_string()),
                None => (String::new(), String::new()),
            };
            writeln!(f, "{nk:<node_w$}  {nc:>8}  |  {ek:<edge_w$}  {ec:>8}")?;
        }
        writeln!(
            f,
            "{:<node_w$}  {:>8}  |  {:<edge_w$}  {:>8}",
            "Total Nodes", self.total_nodes, "Total Edges", self.total_edges
        )?;
        write!(f, "self-loops: {}", self.self_loops)
    }
}
