//! Shared-node query: which graph nodes are reachable from several images?
//!
//! Used to explain nearest-neighbor groups: the concepts that a set of images
//! have in common are exactly the nodes reachable from more than one of them.

use super::graph::Graph;
use super::term::{Iri, Term};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// Knobs for [`shared_nodes`].
#[derive(Debug, Clone)]
pub struct SharedNodesOptions {
    /// Traversal radius. 2 reaches image -> annotation -> concept.
    pub max_hops: usize,
    /// Maximum number of ranked results.
    pub k: usize,
    /// IRI prefixes of bookkeeping nodes (annotation instances) that are
    /// traversed but never reported.
    pub exclude_prefixes: Vec<String>,
    /// When set, a node is only reported if some edge reaching it carries one
    /// of these predicates. Traversal itself is unrestricted.
    pub result_predicates: Option<BTreeSet<Iri>>,
}

impl SharedNodesOptions {
    pub fn new(max_hops: usize, k: usize) -> Self {
        SharedNodesOptions {
            max_hops,
            k,
            exclude_prefixes: Vec::new(),
            result_predicates: None,
        }
    }
}

impl Default for SharedNodesOptions {
    fn default() -> Self {
        SharedNodesOptions::new(2, 10)
    }
}

/// Rank the nodes reachable from at least two of `images` within
/// `opts.max_hops` hops, by descending count of distinct source images;
/// ties break lexicographically on the N-Triples form. Edges are followed
/// in both directions, since annotations point *at* their image.
///
/// The images themselves and nodes matching `exclude_prefixes` are never
/// reported. An image absent from the graph is an error naming it.
pub fn shared_nodes(
    graph: &Graph,
    images: &[Iri],
    opts: &SharedNodesOptions,
) -> Result<Vec<(Term, usize)>> {
    if images.is_empty() {
        return Err(Error::Invalid("shared_nodes requires at least one image".into()));
    }
    if opts.max_hops == 0 {
        return Err(Error::Invalid("max_hops must be at least 1".into()));
    }
    let image_terms: HashSet<Term> = images.iter().cloned().map(Term::Iri).collect();
    for image in images {
        if !graph.mentions(&Term::Iri(image.clone())) {
            return Err(Error::UnknownId {
                kind: "image IRI",
                id: image.as_str().to_string(),
            });
        }
    }

    let mut counts: HashMap<Term, BTreeSet<usize>> = HashMap::new();
    for (source_idx, image) in images.iter().enumerate() {
        for node in reachable_results(graph, image, opts, &image_terms) {
            counts.entry(node).or_default().insert(source_idx);
        }
    }

    let mut ranked: Vec<(Term, usize)> = counts
        .into_iter()
        .filter(|(_, sources)| sources.len() >= 2)
        .map(|(node, sources)| (node, sources.len()))
        .collect();
    ranked.sort_by(|(na, ca), (nb, cb)| cb.cmp(ca).then_with(|| na.to_string().cmp(&nb.to_string())));
    ranked.truncate(opts.k);
    Ok(ranked)
}

/// Nodes reported for a single image: BFS over both edge directions, with the
/// result filters applied per reaching edge.
fn reachable_results(
    graph: &Graph,
    image: &Iri,
    opts: &SharedNodesOptions,
    image_terms: &HashSet<Term>,
) -> BTreeSet<Term> {
    let start = Term::Iri(image.clone());
    let mut visited: HashSet<Term> = HashSet::from([start.clone()]);
    let mut frontier: Vec<Term> = vec![start];
    let mut results = BTreeSet::new();

    for _ in 0..opts.max_hops {
        let mut next = Vec::new();
        for node in &frontier {
            for (neighbor, predicate) in neighbors(graph, node) {
                let allowed = opts
                    .result_predicates
                    .as_ref()
                    .is_none_or(|set| set.contains(predicate));
                if allowed && !image_terms.contains(&neighbor) && !is_excluded(&neighbor, opts) {
                    results.insert(neighbor.clone());
                }
                if visited.insert(neighbor.clone()) {
                    next.push(neighbor);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    results
}

fn is_excluded(node: &Term, opts: &SharedNodesOptions) -> bool {
    match node {
        Term::Iri(iri) => opts
            .exclude_prefixes
            .iter()
            .any(|p| iri.as_str().starts_with(p.as_str())),
        Term::Literal(_) => false,
    }
}

/// Undirected neighborhood of a node, each neighbor paired with the edge
/// predicate it was reached through.
fn neighbors<'g>(graph: &'g Graph, node: &Term) -> Vec<(Term, &'g Iri)> {
    let mut out = Vec::new();
    if let Term::Iri(iri) = node {
        for t in graph.outgoing(iri) {
            out.push((t.object.clone(), &t.predicate));
        }
    }
    for t in graph.incoming(node) {
        out.push((Term::Iri(t.subject.clone()), &t.predicate));
    }
    out
}

/// Convenience map view, used by reports: BTreeMap keeps output deterministic.
pub fn shared_nodes_map(
    graph: &Graph,
    images: &[Iri],
    opts: &SharedNodesOptions,
) -> Result<BTreeMap<String, usize>> {
    Ok(shared_nodes(graph, images, opts)?
        .into_iter()
        .map(|(term, count)| (term.to_string(), count))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::term::Triple;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(iri(s), iri(p), Term::Iri(iri(o)))
    }

    /// Two images annotated with the same concept through annotation nodes.
    fn annotated_pair() -> Graph {
        [
            t("u:ann/1", "u:isAnnotationOf", "u:img/1"),
            t("u:ann/1", "u:typedBy", "u:concept/grass"),
            t("u:ann/2", "u:isAnnotationOf", "u:img/2"),
            t("u:ann/2", "u:typedBy", "u:concept/grass"),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn single_image_shares_nothing() {
        let g = annotated_pair();
        let mut opts = SharedNodesOptions::new(2, 5);
        opts.exclude_prefixes.push("u:ann/".into());
        let out = shared_nodes(&g, &[iri("u:img/1")], &opts).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn two_images_share_the_concept() {
        let g = annotated_pair();
        let mut opts = SharedNodesOptions::new(2, 5);
        opts.exclude_prefixes.push("u:ann/".into());
        let out = shared_nodes(&g, &[iri("u:img/1"), iri("u:img/2")], &opts).unwrap();
        assert_eq!(
            out,
            vec![(Term::Iri(iri("u:concept/grass")), 2)],
            "annotation nodes are excluded, so only the concept remains"
        );
    }

    #[test]
    fn unknown_image_is_named_in_the_error() {
        let g = annotated_pair();
        let opts = SharedNodesOptions::new(2, 5);
        match shared_nodes(&g, &[iri("u:img/1"), iri("u:img/404")], &opts) {
            Err(Error::UnknownId { id, .. }) => assert!(id.contains("404")),
            other => panic!("expected UnknownId, got {other:?}"),
        }
    }

    #[test]
    fn predicate_filter_limits_results_not_traversal() {
        let g = annotated_pair();
        let mut opts = SharedNodesOptions::new(2, 5);
        opts.exclude_prefixes.push("u:ann/".into());
        opts.result_predicates = Some([iri("u:typedBy")].into_iter().collect());
        let out = shared_nodes(&g, &[iri("u:img/1"), iri("u:img/2")], &opts).unwrap();
        // Hop 1 crosses isAnnotationOf (not in the filter) but traversal
        // continues; the concept at hop 2 arrives via typedBy and is kept.
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].1, 2);
    }

    /// Independent BFS oracle: expand paths by scanning the full triple list,
    /// no indexes, then intersect per-image reach sets.
    fn oracle(g: &Graph, images: &[Iri], hops: usize, exclude: &str) -> Vec<(Term, usize)> {
        let all: Vec<Triple> = g.iter().cloned().collect();
        let image_set: HashSet<Term> = images.iter().cloned().map(Term::Iri).collect();
        let mut seen_by: HashMap<Term, usize> = HashMap::new();
        for img in images {
            let mut reach: HashSet<Term> = HashSet::new();
            let mut frontier: HashSet<Term> = HashSet::from([Term::Iri(img.clone())]);
            for _ in 0..hops {
                let mut next = HashSet::new();
                for triple in &all {
                    let subj = Term::Iri(triple.subject.clone());
                    if frontier.contains(&subj) {
                        next.insert(triple.object.clone());
                    }
                    if frontier.contains(&triple.object) {
                        next.insert(subj);
                    }
                }
                for n in &next {
                    reach.insert(n.clone());
                }
                frontier = next;
            }
            for node in reach {
                let skip = image_set.contains(&node)
                    || matches!(&node, Term::Iri(i) if i.as_str().starts_with(exclude));
                if !skip {
                    *seen_by.entry(node).or_insert(0) += 1;
                }
            }
        }
        let mut out: Vec<(Term, usize)> = seen_by.into_iter().filter(|(_, c)| *c >= 2).collect();
        out.sort_by(|(na, ca), (nb, cb)| cb.cmp(ca).then_with(|| na.to_string().cmp(&nb.to_string())));
        out
    }

    #[test]
    fn ranking_matches_bfs_oracle_on_five_image_fixture() {
        let mut g = Graph::new();
        let concepts = ["grass", "tree", "flag", "cross", "water"];
        // image i is annotated with concepts i, i+1 mod 5, and concept 0.
        for i in 0..5usize {
            for (j, c) in [concepts[i], concepts[(i + 1) % 5], concepts[0]]
                .iter()
                .enumerate()
            {
                g.add(t(
                    &format!("u:ann/{i}/{j}"),
                    "u:isAnnotationOf",
                    &format!("u:img/{i}"),
                ));
                g.add(t(
                    &format!("u:ann/{i}/{j}"),
                    "u:typedBy",
                    &format!("u:concept/{c}"),
                ));
            }
        }
        let images: Vec<Iri> = (0..5).map(|i| iri(&format!("u:img/{i}"))).collect();
        let mut opts = SharedNodesOptions::new(2, 10);
        opts.exclude_prefixes.push("u:ann/".into());

        let got = shared_nodes(&g, &images, &opts).unwrap();
        let want = oracle(&g, &images, 2, "u:ann/");
        assert_eq!(got, want);
        // grass (concept 0) is shared by every image and must rank first.
        assert_eq!(got[0], (Term::Iri(iri("u:concept/grass")), 5));
    }

    #[test]
    fn counts_never_exceed_image_count_and_exclude_images() {
        let g = annotated_pair();
        let mut opts = SharedNodesOptions::new(3, 50);
        opts.exclude_prefixes.push("u:ann/".into());
        let images = [iri("u:img/1"), iri("u:img/2")];
        let out = shared_nodes(&g, &images, &opts).unwrap();
        for (node, count) in &out {
            assert!(*count <= images.len());
            assert!(!images.iter().any(|i| Term::Iri(i.clone()) == *node));
        }
    }
}
