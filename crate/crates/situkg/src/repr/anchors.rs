//! Class-stratified anchor selection.
//!
//! Anchors define the coordinate system of relative representations: one
//! ordered draw of training items, reused across every embedding space so
//! that relative stores stay coordinate-compatible.

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// An ordered anchor draw. The order defines relative coordinate order and
/// must never change once a pipeline has produced stores against it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorSet {
    pub anchor_ids: Vec<String>,
    pub per_class_counts: BTreeMap<String, usize>,
    pub seed: u64,
}

impl AnchorSet {
    pub fn len(&self) -> usize {
        self.anchor_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchor_ids.is_empty()
    }

    /// Classes that yielded fewer anchors than requested.
    pub fn short_classes(&self, per_class: usize) -> Vec<(&str, usize)> {
        self.per_class_counts
            .iter()
            .filter(|(_, &n)| n < per_class)
            .map(|(c, &n)| (c.as_str(), n))
            .collect()
    }

    /// Hash of the ordered anchor ids; recorded in artifact sidecars so a
    /// store can be traced to the exact anchor draw it was built against.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for id in &self.anchor_ids {
            hasher.update(id.as_bytes());
            hasher.update([0]);
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("anchor sets serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad anchor file: {e}")))
    }
}

/// Draw up to `per_class` anchors per class without replacement.
///
/// Classes are visited in alphabetical order; within a class the candidate
/// pool is the lexicographically sorted train ids, shuffled by the seeded
/// generator, so output is a pure function of (ids, labels, per_class, seed).
/// A class listed in `expected_classes` with no training instance is an
/// error naming it; classes shorter than `per_class` contribute everything
/// they have.
pub fn select_anchors(
    train_ids: &[String],
    labels: &BTreeMap<String, String>,
    per_class: usize,
    seed: u64,
    expected_classes: Option<&[&str]>,
) -> Result<AnchorSet> {
    if per_class == 0 {
        return Err(Error::Config("per_class must be at least 1".into()));
    }
    let mut by_class: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    if let Some(expected) = expected_classes {
        for class in expected {
            by_class.insert(class, Vec::new());
        }
    }
    for id in train_ids {
        let label = labels.get(id).ok_or(Error::UnknownId {
            kind: "label for train id",
            id: id.clone(),
        })?;
        by_class.entry(label.as_str()).or_default().push(id);
    }
    for (class, members) in &by_class {
        if members.is_empty() {
            return Err(Error::Invalid(format!(
                "class {class:?} has no training instances to draw anchors from"
            )));
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut anchor_ids = Vec::new();
    let mut per_class_counts = BTreeMap::new();
    for (class, mut members) in by_class {
        members.sort_unstable();
        let take = per_class.min(members.len());
        // Partial Fisher-Yates: the first `take` slots become the draw,
        // in draw order.
        for i in 0..take {
            let j = rng.gen_range(i..members.len());
            members.swap(i, j);
        }
        anchor_ids.extend(members[..take].iter().map(|s| s.to_string()));
        per_class_counts.insert(class.to_string(), take);
    }
    Ok(AnchorSet {
        anchor_ids,
        per_class_counts,
        seed,
    })
}
