//! Filtered link-prediction evaluation: a sanity harness for trained models.

use super::model::KgeModel;
use crate::error::Result;
use crate::kg::Triple;
use crate::kg::Term;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkPredictionReport {
    pub hits_at_1: f64,
    pub hits_at_10: f64,
    pub mean_rank: f64,
}

/// Evaluate under the filtered ranking protocol: for each test triple, every
/// entity is scored as a replacement head and tail; candidates that form a
/// *different* known true triple are removed before ranking. The rank is
/// one plus the number of strictly better candidates. Head and tail ranks
/// both enter the metrics.
pub fn link_prediction_eval(
    model: &KgeModel,
    test_triples: &[Triple],
    all_triples: &[Triple],
) -> Result<LinkPredictionReport> {
    let test_ids = resolve(model, test_triples)?;
    let known: HashSet<[usize; 3]> = resolve(model, all_triples)?.into_iter().collect();
    let ranks = ranks_for(model, &test_ids, &known);
    let n = ranks.len().max(1) as f64;
    let hits = |k: usize| ranks.iter().filter(|&&r| r <= k).count() as f64 / n;
    Ok(LinkPredictionReport {
        hits_at_1: hits(1),
        hits_at_10: hits(10),
        mean_rank: ranks.iter().sum::<usize>() as f64 / n,
    })
}

/// Ranks (head and tail for each test triple, in that order) given resolved
/// row ids. Exposed for baseline comparisons that shuffle embeddings.
pub fn ranks_for(
    model: &KgeModel,
    test_ids: &[[usize; 3]],
    known: &HashSet<[usize; 3]>,
) -> Vec<usize> {
    let per_triple: Vec<[usize; 2]> = test_ids
        .par_iter()
        .map(|&[h, r, t]| {
            let true_tail_score = model.score_ids(h, r, t);
            let mut tail_rank = 1;
            let mut head_rank = 1;
            let true_head_score = true_tail_score;
            for e in 0..model.index.entity_count() {
                if e != t && !known.contains(&[h, r, e]) && model.score_ids(h, r, e) < true_tail_score
                {
                    tail_rank += 1;
                }
                if e != h && !known.contains(&[e, r, t]) && model.score_ids(e, r, t) < true_head_score
                {
                    head_rank += 1;
                }
            }
            [head_rank, tail_rank]
        })
        .collect();
    per_triple.into_iter().flatten().collect()
}

pub(super) fn resolve(model: &KgeModel, triples: &[Triple]) -> Result<Vec<[usize; 3]>> {
    triples
        .iter()
        .map(|t| {
            Ok([
                model.index.entity_id(&Term::Iri(t.subject.clone()))?,
                model.index.relation_id(&t.predicate)?,
                model.index.entity_id(&t.object)?,
            ])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{Graph, Iri};
    use crate::kge::{index_graph, init_model, train, KgeConfig};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(iri(s), iri(p), Term::Iri(iri(o)))
    }

    #[test]
    fn memorized_single_triple_has_perfect_hits() {
        let g: Graph = [t("u:a", "u:p", "u:b"), t("u:c", "u:p", "u:d")]
            .into_iter()
            .collect();
        let cfg = KgeConfig {
            dim: 4,
            forbidden_labels: Vec::new(),
            ..KgeConfig::default()
        };
        let mut model = init_model(&cfg, index_graph(&g).unwrap()).unwrap();
        // Force a perfect translation for (a, p, b) and push everything else
        // far away.
        let a = model.index.entity_id(&Term::iri("u:a").unwrap()).unwrap();
        let b = model.index.entity_id(&Term::iri("u:b").unwrap()).unwrap();
        let c = model.index.entity_id(&Term::iri("u:c").unwrap()).unwrap();
        let d = model.index.entity_id(&Term::iri("u:d").unwrap()).unwrap();
        let dim = cfg.dim;
        model.relation_vecs[..dim].copy_from_slice(&[1.0, 0.0, 0.0, 0.0]);
        model.entity_vecs[a * dim..(a + 1) * dim].copy_from_slice(&[0.0, 0.0, 0.0, 0.0]);
        model.entity_vecs[b * dim..(b + 1) * dim].copy_from_slice(&[1.0, 0.0, 0.0, 0.0]);
        model.entity_vecs[c * dim..(c + 1) * dim].copy_from_slice(&[50.0, 50.0, 0.0, 0.0]);
        model.entity_vecs[d * dim..(d + 1) * dim].copy_from_slice(&[-50.0, 30.0, 0.0, 0.0]);

        let test = vec![t("u:a", "u:p", "u:b")];
        let all: Vec<Triple> = g.iter().cloned().collect();
        let report = link_prediction_eval(&model, &test, &all).unwrap();
        assert_eq!(report.hits_at_1, 1.0);
        assert_eq!(report.mean_rank, 1.0);
    }

    #[test]
    fn random_model_mean_rank_is_about_half_the_entity_count() {
        // 40 entities in a sparse graph: expected rank of a random candidate
        // list is (N + 1) / 2; allow 20 percent.
        let n = 40;
        let mut g = Graph::new();
        for i in 0..n {
            g.add(t(&format!("u:e{i}"), "u:p", &format!("u:e{}", (i + 7) % n)));
        }
        let cfg = KgeConfig {
            dim: 12,
            seed: 200,
            forbidden_labels: Vec::new(),
            ..KgeConfig::default()
        };
        let model = init_model(&cfg, index_graph(&g).unwrap()).unwrap();
        let all: Vec<Triple> = g.iter().cloned().collect();
        let report = link_prediction_eval(&model, &all, &all).unwrap();
        let expected = n as f64 / 2.0;
        assert!(
            (report.mean_rank - expected).abs() / expected < 0.2,
            "mean rank {} vs expected {expected}",
            report.mean_rank
        );
    }

    #[test]
    fn training_beats_the_shuffled_embedding_baseline() {
        let g = crate::kge::train::tests::ring_kg(20);
        let cfg = KgeConfig {
            dim: 16,
            epochs: 100,
            batch_size: 16,
            learning_rate: 0.05,
            seed: 4,
            forbidden_labels: Vec::new(),
            ..KgeConfig::default()
        };
        let (model, _) = train(&g, &cfg).unwrap();
        let all: Vec<Triple> = g.iter().cloned().collect();
        let trained = link_prediction_eval(&model, &all, &all).unwrap();

        // Baseline: same model with entity rows permuted, breaking the
        // learned structure while keeping the vector distribution.
        let mut shuffled = model.clone();
        let dim = cfg.dim;
        let mut perm: Vec<usize> = (0..model.index.entity_count()).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        perm.shuffle(&mut rng);
        for (dst, &src) in perm.iter().enumerate() {
            shuffled.entity_vecs[dst * dim..(dst + 1) * dim]
                .copy_from_slice(&model.entity_vecs[src * dim..(src + 1) * dim]);
        }
        let baseline = link_prediction_eval(&shuffled, &all, &all).unwrap();

        assert!(
            trained.hits_at_10 > baseline.hits_at_10,
            "trained {trained:?} vs baseline {baseline:?}"
        );
        assert!(trained.mean_rank < baseline.mean_rank);
        // Memorization sanity: the trained model should place most true
        // triples near the top.
        assert!(trained.hits_at_10 > 0.9, "{trained:?}");
    }
}
