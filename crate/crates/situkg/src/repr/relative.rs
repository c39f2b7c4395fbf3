//! The relative-representation transform: re-express each vector as its
//! similarities to an ordered anchor set.
//!
//! Output coordinates depend only on pairwise angles, so any rotation or
//! reflection applied to all vectors (items and anchors together) leaves the
//! relative representation unchanged. That invariance is what makes stores
//! from unrelated latent spaces comparable.

use super::anchors::AnchorSet;
use super::store::EmbeddingStore;
use crate::error::{Error, Result};
use rayon::prelude::*;

/// Cosine similarity, clamped into [-1, 1] against rounding spill.
/// Zero-norm inputs are an error: the angle is undefined.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimMismatch(format!(
            "cosine of dims {} and {}",
            u.len(),
            v.len()
        )));
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Invalid("cosine of a zero vector".into()));
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Build the relative store of `store` against `anchors`, whose vectors are
/// looked up in `anchor_store`. Row i, column j is the cosine between item i
/// and anchor j, so the output dimension is the anchor count regardless of
/// the input dimension.
///
/// Both stores must be absolute and from the same latent-space family; the
/// anchors were embedded in that same space, anything else is a category
/// error.
pub fn relativize(
    store: &EmbeddingStore,
    anchors: &AnchorSet,
    anchor_store: &EmbeddingStore,
) -> Result<EmbeddingStore> {
    let provenance = store
        .provenance()
        .relativized()
        .ok_or_else(|| {
            Error::Config(format!(
                "cannot relativize a {} store; input must be absolute",
                store.provenance()
            ))
        })?;
    if store.provenance().family() != anchor_store.provenance().family() {
        return Err(Error::Config(format!(
            "store ({}) and anchor store ({}) come from different families",
            store.provenance(),
            anchor_store.provenance()
        )));
    }
    if store.dim() != anchor_store.dim() {
        return Err(Error::DimMismatch(format!(
            "store dim {} vs anchor store dim {}",
            store.dim(),
            anchor_store.dim()
        )));
    }
    if anchors.is_empty() {
        return Err(Error::Config("anchor set is empty".into()));
    }
    let anchor_rows: Vec<&[f64]> = anchors
        .anchor_ids
        .iter()
        .map(|id| {
            anchor_store.get(id).ok_or(Error::UnknownId {
                kind: "anchor vector",
                id: id.clone(),
            })
        })
        .collect::<Result<_>>()?;

    let rows: Vec<Vec<f64>> = store
        .ids()
        .par_iter()
        .enumerate()
        .map(|(i, id)| {
            let item = store.row(i);
            anchor_rows
                .iter()
                .map(|anchor| {
                    cosine(item, anchor).map_err(|_| Error::Invalid(format!(
                        "item {id:?} or an anchor has zero norm; cosine undefined"
                    )))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    EmbeddingStore::new(store.ids().to_vec(), rows, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::Provenance;
    use std::collections::BTreeMap;

    fn abs_store(rows: Vec<(&str, Vec<f64>)>) -> EmbeddingStore {
        let (ids, vecs): (Vec<_>, Vec<_>) = rows
            .into_iter()
            .map(|(id, v)| (id.to_string(), v))
            .unzip();
        EmbeddingStore::new(ids, vecs, Provenance::KgeAbsolute).unwrap()
    }

    fn anchor_set(ids: &[&str]) -> AnchorSet {
        AnchorSet {
            anchor_ids: ids.iter().map(|s| s.to_string()).collect(),
            per_class_counts: BTreeMap::new(),
            seed: 0,
        }
    }

    #[test]
    fn cosine_of_self_is_one() {
        let u = [0.3, -1.2, 7.0];
        assert!((cosine(&u, &u).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_of_orthogonal_unit_vectors_is_zero() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn cosine_matches_hand_arithmetic() {
        // dot = 32, |u| = sqrt(14), |v| = sqrt(77): 32 / sqrt(1078).
        let got = cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!((got - 0.9746318461970762).abs() < 1e-12);
    }

    #[test]
    fn cosine_rejects_zero_vectors_and_dim_mismatch() {
        assert!(cosine(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(cosine(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn anchor_items_get_a_unit_coordinate() {
        let store = abs_store(vec![("a", vec![1.0, 1.0]), ("b", vec![2.0, 0.0])]);
        let rel = relativize(&store, &anchor_set(&["b", "a"]), &store).unwrap();
        assert_eq!(rel.dim(), 2);
        // "a" is anchor 1, "b" is anchor 0.
        assert!((rel.get("a").unwrap()[1] - 1.0).abs() < 1e-12);
        assert!((rel.get("b").unwrap()[0] - 1.0).abs() < 1e-12);
        assert_eq!(rel.provenance(), Provenance::KgeRelative);
    }

    #[test]
    fn single_anchor_gives_dim_one() {
        let store = abs_store(vec![("a", vec![1.0, 0.0]), ("b", vec![0.0, 2.0])]);
        let rel = relativize(&store, &anchor_set(&["a"]), &store).unwrap();
        assert_eq!(rel.dim(), 1);
    }

    #[test]
    fn full_matrix_matches_pairwise_cosine_oracle() {
        let store = abs_store(vec![
            ("x", vec![1.0, 2.0, 3.0]),
            ("y", vec![-1.0, 0.5, 0.0]),
            ("z", vec![4.0, -4.0, 1.0]),
        ]);
        let anchors = anchor_set(&["y", "x"]);
        let rel = relativize(&store, &anchors, &store).unwrap();
        for (i, id) in store.ids().iter().enumerate() {
            for (j, aid) in anchors.anchor_ids.iter().enumerate() {
                let want = cosine(store.row(i), store.get(aid).unwrap()).unwrap();
                let got = rel.get(id).unwrap()[j];
                assert!((got - want).abs() < 1e-15, "{id} vs {aid}");
            }
        }
    }

    #[test]
    fn missing_anchor_vector_is_named() {
        let store = abs_store(vec![("a", vec![1.0])]);
        let err = relativize(&store, &anchor_set(&["ghost"]), &store).unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn family_mismatch_is_rejected() {
        let kge = abs_store(vec![("a", vec![1.0])]);
        let cv = EmbeddingStore::new(
            vec!["a".into()],
            vec![vec![1.0]],
            Provenance::CvAbsolute,
        )
        .unwrap();
        assert!(relativize(&kge, &anchor_set(&["a"]), &cv).is_err());
    }

    #[test]
    fn relative_stores_cannot_be_relativized_again() {
        let store = abs_store(vec![("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0])]);
        let rel = relativize(&store, &anchor_set(&["a", "b"]), &store).unwrap();
        assert!(relativize(&rel, &anchor_set(&["a"]), &rel).is_err());
    }
}
