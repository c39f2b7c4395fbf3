//! Late fusion of two embedding stores.

use crate::error::{Error, Result};
use crate::repr::{EmbeddingStore, Provenance};
use serde::{Deserialize, Serialize};

/// How two stores are combined per item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionKind {
    /// Rows side by side: output dim is the sum of the input dims.
    Concat,
    /// Elementwise product: requires equal dims, never pads.
    Hadamard,
}

impl std::str::FromStr for FusionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concat" => Ok(FusionKind::Concat),
            "hadamard" => Ok(FusionKind::Hadamard),
            other => Err(Error::Config(format!(
                "unknown fusion kind {other:?} (expected concat or hadamard)"
            ))),
        }
    }
}

impl std::fmt::Display for FusionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FusionKind::Concat => "concat",
            FusionKind::Hadamard => "hadamard",
        })
    }
}

/// Fuse two stores covering the same items in the same order. Block order
/// under concatenation is (first argument, second argument).
pub fn fuse(a: &EmbeddingStore, b: &EmbeddingStore, kind: FusionKind) -> Result<EmbeddingStore> {
    if a.ids() != b.ids() {
        let divergent = a
            .ids()
            .iter()
            .zip(b.ids())
            .find(|(x, y)| x != y)
            .map(|(x, y)| format!("first divergent id: {x:?} vs {y:?}"))
            .unwrap_or_else(|| format!("lengths differ: {} vs {}", a.len(), b.len()));
        return Err(Error::IdMismatch(divergent));
    }
    if kind == FusionKind::Hadamard && a.dim() != b.dim() {
        return Err(Error::DimMismatch(format!(
            "hadamard requires equal dims, got {} and {}",
            a.dim(),
            b.dim()
        )));
    }

    let rows: Vec<Vec<f64>> = a
        .iter()
        .zip(b.iter())
        .map(|((_, ra), (_, rb))| match kind {
            FusionKind::Concat => {
                let mut row = Vec::with_capacity(ra.len() + rb.len());
                row.extend_from_slice(ra);
                row.extend_from_slice(rb);
                row
            }
            FusionKind::Hadamard => ra.iter().zip(rb).map(|(x, y)| x * y).collect(),
        })
        .collect();

    EmbeddingStore::new(a.ids().to_vec(), rows, Provenance::Hybrid)
}
