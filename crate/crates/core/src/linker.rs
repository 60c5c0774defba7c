//! Drug mention normalization against a names lexicon, with a word-vector
//! fallback for mentions that cannot be linked.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::EntityId;

/// Case-folds and collapses runs of whitespace to single spaces.
pub fn normalize(surface: &str) -> String {
    surface
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, EntityId>,
    /// token -> keys containing it
    token_index: HashMap<String, Vec<String>>,
    collisions: usize,
}

impl Lexicon {
    /// Parses `surface<TAB>entity_id` lines. On a surface collision the first
    /// mapping is kept.
    pub fn build<R: BufRead>(names: R, source_name: &str) -> Result<Self> {
        let mut lexicon = Lexicon::default();
        for (lineno, line) in names.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 2 {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("expected `surface<TAB>entity_id`, got {} fields", fields.len()),
                ));
            }
            let key = normalize(fields[0]);
            if key.is_empty() {
                return Err(Error::parse(source_name, lineno, "empty surface form"));
            }
            let id = EntityId::new(fields[1].trim())
                .map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
            lexicon.insert(key, id, source_name, lineno);
        }
        if lexicon.collisions > 0 {
            log::warn!("{source_name}: {} conflicting surface form(s) ignored", lexicon.collisions);
        }
        Ok(lexicon)
    }

    fn insert(&mut self, key: String, id: EntityId, source_name: &str, lineno: usize) {
        match self.entries.get(&key) {
            Some(existing) if *existing != id => {
                log::warn!(
                    "{source_name}:{lineno}: `{key}` already maps to {existing}, ignoring {id}"
                );
                self.collisions += 1;
            }
            Some(_) => {}
            None => {
                for token in key.split(' ') {
                    let keys = self.token_index.entry(token.to_string()).or_default();
                    if !keys.contains(&key) {
                        keys.push(key.clone());
                    }
                }
                self.entries.insert(key, id);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn collisions(&self) -> usize {
        self.collisions
    }

    pub fn get(&self, surface: &str) -> Option<&EntityId> {
        self.entries.get(&normalize(surface))
    }

    /// Links a mention to an entity.
    ///
    /// An exact normalized match wins. Otherwise the key with the longest
    /// contiguous run of tokens shared with the mention is chosen (at least one
    /// token), preferring keys with more tokens and then the lexicographically
    /// smallest key.
    pub fn link(&self, mention: &str) -> Option<EntityId> {
        let norm = normalize(mention);
        if let Some(id) = self.entries.get(&norm) {
            return Some(id.clone());
        }
        let tokens: Vec<&str> = norm.split(' ').filter(|t| !t.is_empty()).collect();
        let mut best: Option<(usize, usize, &str)> = None;
        let mut candidates: Vec<&str> = tokens
            .iter()
            .filter_map(|t| self.token_index.get(*t))
            .flatten()
            .map(String::as_str)
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        for key in candidates {
            let key_tokens: Vec<&str> = key.split(' ').collect();
            let overlap = longest_common_run(&tokens, &key_tokens);
            if overlap == 0 {
                continue;
            }
            let rank = (overlap, key_tokens.len());
            let wins = match best {
                None => true,
                Some((o, l, k)) => rank > (o, l) || (rank == (o, l) && key < k),
            };
            if wins {
                best = Some((overlap, key_tokens.len(), key));
            }
        }
        best.map(|(_, _, key)| self.entries[key].clone())
    }
}

/// Length of the longest contiguous token sequence shared by `a` and `b`.
fn longest_common_run(a: &[&str], b: &[&str]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut best = 0;
    for x in a {
        let mut cur = vec![0usize; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            if x == y {
                cur[j + 1] = prev[j] + 1;
                best = best.max(cur[j + 1]);
            }
        }
        prev = cur;
    }
    best
}

/// Pretrained word vectors used for mentions that do not link to the graph.
#[derive(Debug, Clone)]
pub struct FallbackTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl FallbackTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("fallback dimension must be positive".into()));
        }
        Ok(FallbackTable {
            dim,
            vectors: HashMap::new(),
        })
    }

    pub fn insert(&mut self, token: &str, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector for `{token}` has {} components, expected {}",
                vector.len(),
                self.dim
            )));
        }
        self.vectors.insert(token.to_string(), vector);
        Ok(())
    }

    /// Reads the word2vec text format: a `count dim` header, then
    /// `token v1 ... v_dim` lines.
    pub fn read_word2vec<R: BufRead>(source: R, source_name: &str) -> Result<Self> {
        let mut lines = source.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(source_name, 1, "missing `count dim` header"))??;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::parse(source_name, 1, format!("bad header field `{s}`: {e}")))
        };
        if parts.len() != 2 {
            return Err(Error::parse(source_name, 1, "header must be `count dim`"));
        }
        let count = parse_usize(parts[0])?;
        let dim = parse_usize(parts[1])?;
        let mut table = FallbackTable::new(dim)?;
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("non-blank");
            let vector = fields
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::parse(source_name, lineno, format!("bad float `{f}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if vector.len() != dim {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("expected {dim} components, got {}", vector.len()),
                ));
            }
            table.vectors.insert(token.to_string(), vector);
        }
        if table.vectors.len() != count {
            log::warn!(
                "{source_name}: header declares {count} vectors, read {}",
                table.vectors.len()
            );
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn token_vector(&self, token: &str) -> Vec<f64> {
        if let Some(v) = self.vectors.get(token) {
            return v.clone();
        }
        let lower = token.to_lowercase();
        if let Some(v) = self.vectors.get(&lower) {
            return v.clone();
        }
        self.oov_vector(&lower)
    }

    /// Deterministic vector for an unknown token, uniform in `[-0.5/d, 0.5/d]`.
    fn oov_vector(&self, token: &str) -> Vec<f64> {
        let digest = Sha256::digest(token.as_bytes());
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = ChaCha8Rng::from_seed(seed);
        let bound = 0.5 / self.dim as f64;
        let uniform = Uniform::new_inclusive(-bound, bound);
        (0..self.dim).map(|_| uniform.sample(&mut rng)).collect()
    }

    /// Mean of the per-token vectors of `mention`.
    pub fn fallback_vector(&self, mention: &str) -> Result<Vec<f64>> {
        let tokens: Vec<&str> = mention.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(Error::Argument("cannot build a fallback vector for an empty mention".into()));
        }
        let mut acc = vec![0.0; self.dim];
        for token in &tokens {
            for (a, v) in acc.iter_mut().zip(self.token_vector(token)) {
                *a += v;
            }
        }
        let n = tokens.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon(text: &str) -> Lexicon {
        Lexicon::build(text.as_bytes(), "names").unwrap()
    }

    #[test]
    fn builds_and_normalizes() {
        assert_eq!(lexicon("aspirin\tDB1\nibuprofen\tDB2\n").len(), 2);
        let l = lexicon("Aspirin\tDB1\naspirin\tDB1\n");
        assert_eq!(l.len(), 1);
        assert_eq!(l.collisions(), 0);
        assert_eq!(l.get("  ASPIRIN ").unwrap().as_str(), "DB1");
    }

    #[test]
    fn first_mapping_wins_on_collision() {
        let l = lexicon("aspirin\tDB1\nAspirin\tDB9\n");
        assert_eq!(l.collisions(), 1);
        assert_eq!(l.link("aspirin").unwrap().as_str(), "DB1");
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = Lexicon::build("a\tDB1\nbroken\n".as_bytes(), "names").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn exact_match() {
        let l = lexicon("aspirin\tDB1\naspirin tablets\tDB2\n");
        assert_eq!(l.link("Aspirin").unwrap().as_str(), "DB1");
    }

    #[test]
    fn longest_overlap_wins() {
        let l = lexicon("acetylsalicylic acid\tDB1\nfolic acid\tDB2\n");
        assert_eq!(l.link("acetylsalicylic acid tablets").unwrap().as_str(), "DB1");
        assert_eq!(l.link("xyzzyol"), None);
        assert_eq!(l.link(""), None);
    }

    #[test]
    fn ties_prefer_longer_then_lexicographic_key() {
        let l = lexicon("acid\tDB1\nfolic acid\tDB2\nboric acid\tDB3\n");
        // all overlap by one token; the two-token keys win, "boric acid" < "folic acid"
        assert_eq!(l.link("acid solution").unwrap().as_str(), "DB3");
    }

    #[test]
    fn common_run_is_contiguous() {
        assert_eq!(longest_common_run(&["a", "b", "c"], &["a", "x", "c"]), 1);
        assert_eq!(longest_common_run(&["a", "b", "c"], &["z", "b", "c"]), 2);
        assert_eq!(longest_common_run(&[], &["a"]), 0);
    }

    #[test]
    fn fallback_vectors() {
        let mut t = FallbackTable::new(2).unwrap();
        t.insert("warfarin", vec![1.0, 2.0]).unwrap();
        t.insert("sodium", vec![3.0, -2.0]).unwrap();
        assert_eq!(t.fallback_vector("warfarin").unwrap(), vec![1.0, 2.0]);
        assert_eq!(t.fallback_vector("warfarin sodium").unwrap(), vec![2.0, 0.0]);
        let a = t.fallback_vector("xyzzyol").unwrap();
        assert_eq!(a, t.fallback_vector("xyzzyol").unwrap());
        assert!(a.iter().all(|v| v.abs() <= 0.25));
        assert_ne!(a, t.fallback_vector("plugh").unwrap());
        assert!(matches!(t.fallback_vector("   "), Err(Error::Argument(_))));
        assert!(t.insert("bad", vec![1.0]).is_err());
    }

    #[test]
    fn reads_word2vec_text() {
        let t = FallbackTable::read_word2vec("2 3\nfoo 1 2 3\nbar 0.5 0 -1\n".as_bytes(), "w2v").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.len(), 2);
        assert_eq!(t.fallback_vector("Foo").unwrap(), vec![1.0, 2.0, 3.0]);
        let err = FallbackTable::read_word2vec("1 3\nfoo 1 2\n".as_bytes(), "w2v").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
