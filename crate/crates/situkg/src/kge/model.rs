//! Model state for translational embeddings: a triple is plausible when the
//! head vector translated by the relation vector lands near the tail vector,
//! so the score is the distance between `head + relation` and `tail`.

use super::config::{KgeConfig, Norm};
use crate::error::{Error, Result};
use crate::kg::{Graph, Iri, Term};
use crate::repr::{EmbeddingStore, Provenance};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::HashMap;

/// The index side of a model: who sits in which row.
///
/// Entities are all subjects plus all objects; literal objects are indexed as
/// entities keyed by their full lexical form (datatype included), since a
/// translational model has no special literal handling. Rows are assigned in
/// the canonical (sorted N-Triples) order of the keys, and triples are
/// enumerated in canonical statement order, so indexing is a pure function
/// of the graph.
#[derive(Debug, Clone)]
pub struct GraphIndex {
    pub entities: Vec<Term>,
    pub relations: Vec<Iri>,
    entity_ids: HashMap<Term, usize>,
    relation_ids: HashMap<Iri, usize>,
    /// (head, relation, tail) row ids in canonical order.
    pub triples: Vec<[usize; 3]>,
}

impl GraphIndex {
    /// Rebuild an index from checkpoint tables. The statement list is not
    /// part of a checkpoint, so continued training needs the original graph.
    pub(crate) fn from_parts(
        entities: Vec<Term>,
        relations: Vec<Iri>,
        entity_ids: HashMap<Term, usize>,
        relation_ids: HashMap<Iri, usize>,
    ) -> Self {
        GraphIndex {
            entities,
            relations,
            entity_ids,
            relation_ids,
            triples: Vec::new(),
        }
    }

    pub fn entity_id(&self, term: &Term) -> Result<usize> {
        self.entity_ids.get(term).copied().ok_or(Error::UnknownId {
            kind: "entity",
            id: term.to_string(),
        })
    }

    pub fn relation_id(&self, iri: &Iri) -> Result<usize> {
        self.relation_ids
            .get(iri)
            .copied()
            .ok_or(Error::UnknownId {
                kind: "relation",
                id: iri.to_string(),
            })
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }
}

/// Index a graph's entities, relations and statements deterministically.
pub fn index_graph(graph: &Graph) -> Result<GraphIndex> {
    if graph.is_empty() {
        return Err(Error::Invalid("cannot index an empty graph".into()));
    }
    let mut entity_keys: Vec<(String, Term)> = Vec::new();
    let mut relation_keys: Vec<(String, Iri)> = Vec::new();
    let mut seen_entities = HashMap::new();
    let mut seen_relations = HashMap::new();
    for t in graph.iter() {
        for term in [Term::Iri(t.subject.clone()), t.object.clone()] {
            if !seen_entities.contains_key(&term) {
                seen_entities.insert(term.clone(), ());
                entity_keys.push((term.to_string(), term));
            }
        }
        if !seen_relations.contains_key(&t.predicate) {
            seen_relations.insert(t.predicate.clone(), ());
            relation_keys.push((t.predicate.to_string(), t.predicate.clone()));
        }
    }
    entity_keys.sort_by(|(a, _), (b, _)| a.cmp(b));
    relation_keys.sort_by(|(a, _), (b, _)| a.cmp(b));

    let entities: Vec<Term> = entity_keys.into_iter().map(|(_, t)| t).collect();
    let relations: Vec<Iri> = relation_keys.into_iter().map(|(_, r)| r).collect();
    let entity_ids: HashMap<Term, usize> = entities
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let relation_ids: HashMap<Iri, usize> = relations
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), i))
        .collect();

    let mut lines: Vec<(String, [usize; 3])> = graph
        .iter()
        .map(|t| {
            let ids = [
                entity_ids[&Term::Iri(t.subject.clone())],
                relation_ids[&t.predicate],
                entity_ids[&t.object],
            ];
            (t.to_ntriples(), ids)
        })
        .collect();
    lines.sort_by(|(a, _), (b, _)| a.cmp(b));
    let triples = lines.into_iter().map(|(_, ids)| ids).collect();

    Ok(GraphIndex {
        entities,
        relations,
        entity_ids,
        relation_ids,
        triples,
    })
}

/// Entity and relation embedding matrices plus the index that names rows.
#[derive(Debug, Clone)]
pub struct KgeModel {
    pub config: KgeConfig,
    pub index: GraphIndex,
    /// Row-major |E| x dim.
    pub entity_vecs: Vec<f64>,
    /// Row-major |R| x dim.
    pub relation_vecs: Vec<f64>,
}

/// Initialize from the seeded generator: entries uniform in
/// [-6/sqrt(dim), +6/sqrt(dim)], relation rows L2-normalized once.
pub fn init_model(config: &KgeConfig, index: GraphIndex) -> Result<KgeModel> {
    config.validate()?;
    let dim = config.dim;
    let bound = 6.0 / (dim as f64).sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut draw = |n: usize| -> Vec<f64> {
        (0..n * dim).map(|_| rng.gen_range(-bound..bound)).collect()
    };
    let entity_vecs = draw(index.entity_count());
    let mut relation_vecs = draw(index.relation_count());
    for row in relation_vecs.chunks_mut(dim) {
        let norm = l2(row);
        if norm > 0.0 {
            for v in row {
                *v /= norm;
            }
        }
    }
    Ok(KgeModel {
        config: config.clone(),
        index,
        entity_vecs,
        relation_vecs,
    })
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Distance between `h + r` and `t` under the given norm.
pub fn distance(h: &[f64], r: &[f64], t: &[f64], norm: Norm) -> f64 {
    match norm {
        Norm::L1 => h
            .iter()
            .zip(r)
            .zip(t)
            .map(|((h, r), t)| (h + r - t).abs())
            .sum(),
        Norm::L2 => h
            .iter()
            .zip(r)
            .zip(t)
            .map(|((h, r), t)| {
                let d = h + r - t;
                d * d
            })
            .sum::<f64>()
            .sqrt(),
    }
}

impl KgeModel {
    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn entity_row(&self, id: usize) -> &[f64] {
        &self.entity_vecs[id * self.dim()..(id + 1) * self.dim()]
    }

    pub fn relation_row(&self, id: usize) -> &[f64] {
        &self.relation_vecs[id * self.dim()..(id + 1) * self.dim()]
    }

    /// Score by row ids; lower is better, zero means a perfect translation.
    pub fn score_ids(&self, h: usize, r: usize, t: usize) -> f64 {
        distance(
            self.entity_row(h),
            self.relation_row(r),
            self.entity_row(t),
            self.config.norm,
        )
    }

    /// Score by terms, failing on anything the model has never seen.
    pub fn score(&self, head: &Term, relation: &Iri, tail: &Term) -> Result<f64> {
        let h = self.index.entity_id(head)?;
        let r = self.index.relation_id(relation)?;
        let t = self.index.entity_id(tail)?;
        Ok(self.score_ids(h, r, t))
    }

    /// Export image vectors as an absolute KGE store. `items` pairs each
    /// store id with the graph node carrying it.
    pub fn image_embeddings(&self, items: &[(String, Iri)]) -> Result<EmbeddingStore> {
        let mut ids = Vec::with_capacity(items.len());
        let mut rows = Vec::with_capacity(items.len());
        for (id, iri) in items {
            let row = self.index.entity_id(&Term::Iri(iri.clone())).map_err(|_| {
                Error::UnknownId {
                    kind: "image entity",
                    id: iri.to_string(),
                }
            })?;
            ids.push(id.clone());
            rows.push(self.entity_row(row).to_vec());
        }
        EmbeddingStore::new(ids, rows, Provenance::KgeAbsolute)
    }
}
