//! Anti-leakage filter: strips statements that mention target class names.
//!
//! Embeddings trained on the graph must not be able to read the class label
//! straight out of a node name, so every triple whose subject or object
//! mentions a target label is dropped before training. Predicates are left
//! alone: a predicate cannot be reached from an image node by entity lookup.

use super::graph::Graph;
use super::term::Term;

/// The seven abstract-concept class labels.
pub const AC_LABELS: [&str; 7] = [
    "comfort", "danger", "death", "fitness", "freedom", "power", "safety",
];

/// True if `text` contains any of `forbidden` case-insensitively.
fn contains_forbidden(text: &str, forbidden: &[String]) -> bool {
    let lower = text.to_lowercase();
    forbidden.iter().any(|f| lower.contains(f.as_str()))
}

/// True if the triple must be removed: its subject IRI local name, object IRI
/// local name, or object literal lexical form contains a forbidden label as a
/// case-insensitive substring.
fn is_contaminated(triple: &super::term::Triple, forbidden: &[String]) -> bool {
    if contains_forbidden(triple.subject.local_name(), forbidden) {
        return true;
    }
    match &triple.object {
        Term::Iri(iri) => contains_forbidden(iri.local_name(), forbidden),
        Term::Literal(lit) => contains_forbidden(lit.lexical(), forbidden),
    }
}

/// Remove every triple that mentions a forbidden label in subject or object
/// position. Returns the filtered graph and the number of removed triples.
///
/// Matching is a case-insensitive substring test against the IRI local name
/// (text after the last `/` or `#`) or the literal lexical form, so base-IRI
/// text can never trigger a false positive.
pub fn filter_leakage(graph: &Graph, forbidden: &[String]) -> (Graph, usize) {
    let forbidden: Vec<String> = forbidden.iter().map(|f| f.to_lowercase()).collect();
    let mut kept = Graph::new();
    for triple in graph.iter() {
        if !is_contaminated(triple, &forbidden) {
            kept.add(triple.clone());
        }
    }
    let removed = graph.len() - kept.len();
    (kept, removed)
}

/// Owned `String` copies of [`AC_LABELS`], the default forbidden set.
pub fn default_forbidden() -> Vec<String> {
    AC_LABELS.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::term::{Iri, Triple};

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn t(s: &str, p: &str, o: Term) -> Triple {
        Triple::new(iri(s), iri(p), o)
    }

    #[test]
    fn clean_graph_is_untouched() {
        let g: Graph = [
            t("u:img/1", "u:p", Term::Iri(iri("u:grass"))),
            t("u:img/2", "u:p", Term::literal("a meadow")),
        ]
        .into_iter()
        .collect();
        let (out, removed) = filter_leakage(&g, &default_forbidden());
        assert_eq!(removed, 0);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn object_literal_match_is_removed() {
        let g: Graph = [t("u:img/1", "u:p", Term::literal("comfort"))]
            .into_iter()
            .collect();
        let (out, removed) = filter_leakage(&g, &default_forbidden());
        assert_eq!(removed, 1);
        assert!(out.is_empty());
    }

    #[test]
    fn subject_hits_count_but_predicate_hits_do_not() {
        // Mixed-case "Freedom" in a subject local name, "power" only in
        // predicates: removals must equal the subject hits alone.
        let g: Graph = [
            t("u:node/Freedom_statue", "u:p", Term::Iri(iri("u:x"))),
            t("u:node/eagle", "u:hasPower", Term::Iri(iri("u:y"))),
            t("u:node/eagle", "u:powerOf", Term::literal("два")),
        ]
        .into_iter()
        .collect();

        // Independent brute-force oracle over the same rule.
        let forbidden = default_forbidden();
        let expected_removed = g
            .iter()
            .filter(|t| {
                let subj = t.subject.local_name().to_lowercase();
                let obj = match &t.object {
                    Term::Iri(i) => i.local_name().to_lowercase(),
                    Term::Literal(l) => l.lexical().to_lowercase(),
                };
                forbidden
                    .iter()
                    .any(|f| subj.contains(f.as_str()) || obj.contains(f.as_str()))
            })
            .count();
        assert_eq!(expected_removed, 1);

        let (out, removed) = filter_leakage(&g, &forbidden);
        assert_eq!(removed, expected_removed);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn base_iri_text_does_not_trigger() {
        // "danger" in the namespace but not the local name.
        let g: Graph = [t("http://danger.example/node/tree", "u:p", Term::Iri(iri("u:x")))]
            .into_iter()
            .collect();
        let (_, removed) = filter_leakage(&g, &default_forbidden());
        assert_eq!(removed, 0);
    }

    #[test]
    fn filtering_is_idempotent() {
        let g: Graph = [
            t("u:node/Freedom", "u:p", Term::Iri(iri("u:x"))),
            t("u:node/tree", "u:p", Term::Iri(iri("u:x"))),
            t("u:node/tree", "u:p", Term::literal("Safety first")),
        ]
        .into_iter()
        .collect();
        let forbidden = default_forbidden();
        let (once, removed_once) = filter_leakage(&g, &forbidden);
        let (twice, removed_twice) = filter_leakage(&once, &forbidden);
        assert_eq!(removed_once, 2);
        assert_eq!(removed_twice, 0);
        assert_eq!(once.len(), twice.len());
    }
}
