//! Indexed, deduplicated triple store.

use super::term::{Iri, Term, Triple};
use std::collections::{BTreeMap, HashSet};

/// An in-memory triple set with subject/predicate/object indexes.
///
/// Duplicate statements are ignored on insert, so the store has set semantics.
/// Index entries are `u32` offsets into the insertion-ordered triple list;
/// lookups return exactly what a linear scan would.
#[derive(Debug, Default, Clone)]
pub struct Graph {
    triples: Vec<Triple>,
    seen: HashSet<Triple>,
    by_subject: BTreeMap<Iri, Vec<u32>>,
    by_predicate: BTreeMap<Iri, Vec<u32>>,
    by_object: BTreeMap<Term, Vec<u32>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Insert a triple. Returns true if the graph grew.
    pub fn add(&mut self, triple: Triple) -> bool {
        if self.seen.contains(&triple) {
            return false;
        }
        let id = self.triples.len() as u32;
        self.by_subject
            .entry(triple.subject.clone())
            .or_default()
            .push(id);
        self.by_predicate
            .entry(triple.predicate.clone())
            .or_default()
            .push(id);
        self.by_object
            .entry(triple.object.clone())
            .or_default()
            .push(id);
        self.seen.insert(triple.clone());
        self.triples.push(triple);
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.seen.contains(triple)
    }

    /// Triples in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Merge another graph into this one (set union).
    pub fn extend_from(&mut self, other: &Graph) {
        for t in other.iter() {
            self.add(t.clone());
        }
    }

    /// All triples matching the bound positions of the pattern. Unbound
    /// positions (`None`) match anything; the all-wildcard pattern returns
    /// the whole graph.
    pub fn query(
        &self,
        subject: Option<&Iri>,
        predicate: Option<&Iri>,
        object: Option<&Term>,
    ) -> Vec<&Triple> {
        // Start from the most selective available index.
        let candidates: Option<&[u32]> = {
            let s = subject.map(|s| self.by_subject.get(s).map_or(&[][..], Vec::as_slice));
            let p = predicate.map(|p| self.by_predicate.get(p).map_or(&[][..], Vec::as_slice));
            let o = object.map(|o| self.by_object.get(o).map_or(&[][..], Vec::as_slice));
            [s, p, o].into_iter().flatten().min_by_key(|ids| ids.len())
        };

        let matches = |t: &Triple| {
            subject.is_none_or(|s| &t.subject == s)
                && predicate.is_none_or(|p| &t.predicate == p)
                && object.is_none_or(|o| &t.object == o)
        };

        match candidates {
            Some(ids) => ids
                .iter()
                .map(|&id| &self.triples[id as usize])
                .filter(|t| matches(t))
                .collect(),
            None => self.triples.iter().filter(|t| matches(t)).collect(),
        }
    }

    /// Outgoing edges of a node.
    pub fn outgoing(&self, subject: &Iri) -> impl Iterator<Item = &Triple> {
        self.by_subject
            .get(subject)
            .into_iter()
            .flatten()
            .map(|&id| &self.triples[id as usize])
    }

    /// Incoming edges of a node.
    pub fn incoming(&self, object: &Term) -> impl Iterator<Item = &Triple> {
        self.by_object
            .get(object)
            .into_iter()
            .flatten()
            .map(|&id| &self.triples[id as usize])
    }

    /// True if the term occurs anywhere in the graph (any position).
    pub fn mentions(&self, term: &Term) -> bool {
        if self.by_object.contains_key(term) {
            return true;
        }
        match term {
            Term::Iri(iri) => {
                self.by_subject.contains_key(iri) || self.by_predicate.contains_key(iri)
            }
            Term::Literal(_) => false,
        }
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        for t in iter {
            g.add(t);
        }
        g
    }
}

/// Statistics helper used by index-consistency tests.
#[cfg(test)]
fn scan(graph: &Graph, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> Vec<Triple> {
    graph
        .iter()
        .filter(|t| {
            s.is_none_or(|s| &t.subject == s)
                && p.is_none_or(|p| &t.predicate == p)
                && o.is_none_or(|o| &t.object == o)
        })
        .cloned()
        .collect()
}
