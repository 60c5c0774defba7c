use rand::Rng;

use crate::error::Result;
use crate::graph::{IndexedTriple, KnowledgeGraph, Triple};

const MAX_ATTEMPTS: usize = 100;

/// Replaces the head or the tail (fair coin) with a uniformly drawn entity of
/// the same kind, resampling until the result is not a known triple. After
/// `MAX_ATTEMPTS` draws the last candidate is returned even if it is known.
pub fn corrupt_indexed<R: Rng + ?Sized>(
    triple: IndexedTriple,
    graph: &KnowledgeGraph,
    rng: &mut R,
) -> IndexedTriple {
    let vocab = graph.vocab();
    let replace_head = rng.gen_bool(0.5);
    let slot = if replace_head { triple.head } else { triple.tail };
    let pool = vocab.entities_of_kind(vocab.entity_kind(slot));
    let mut candidate = triple;
    for _ in 0..MAX_ATTEMPTS {
        let e = pool[rng.gen_range(0..pool.len())];
        candidate = if replace_head {
            IndexedTriple { head: e, ..triple }
        } else {
            IndexedTriple { tail: e, ..triple }
        };
        if !graph.contains_indexed(candidate) {
            break;
        }
    }
    candidate
}

/// Named-triple form of [`corrupt_indexed`].
pub fn corrupt<R: Rng + ?Sized>(triple: &Triple, graph: &KnowledgeGraph, rng: &mut R) -> Result<Triple> {
    let t = graph.vocab().index_triple(triple)?;
    Ok(graph.vocab().triple(corrupt_indexed(t, graph, rng)))
}
