//! Embedding stores: ordered id -> vector maps with provenance.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::path::Path;

/// Where a store's vectors came from. Relativization and fusion change it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    KgeAbsolute,
    CvAbsolute,
    KgeRelative,
    CvRelative,
    Hybrid,
}

/// The latent-space family a store belongs to, ignoring absolute/relative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Kge,
    Cv,
    Hybrid,
}

impl Provenance {
    pub fn family(self) -> Family {
        match self {
            Provenance::KgeAbsolute | Provenance::KgeRelative => Family::Kge,
            Provenance::CvAbsolute | Provenance::CvRelative => Family::Cv,
            Provenance::Hybrid => Family::Hybrid,
        }
    }

    pub fn is_absolute(self) -> bool {
        matches!(self, Provenance::KgeAbsolute | Provenance::CvAbsolute)
    }

    pub fn is_relative(self) -> bool {
        matches!(self, Provenance::KgeRelative | Provenance::CvRelative)
    }

    /// The relative counterpart of an absolute provenance.
    pub fn relativized(self) -> Option<Provenance> {
        match self {
            Provenance::KgeAbsolute => Some(Provenance::KgeRelative),
            Provenance::CvAbsolute => Some(Provenance::CvRelative),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::KgeAbsolute => "kge-absolute",
            Provenance::CvAbsolute => "cv-absolute",
            Provenance::KgeRelative => "kge-relative",
            Provenance::CvRelative => "cv-relative",
            Provenance::Hybrid => "hybrid",
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kge-absolute" => Ok(Provenance::KgeAbsolute),
            "cv-absolute" => Ok(Provenance::CvAbsolute),
            "kge-relative" => Ok(Provenance::KgeRelative),
            "cv-relative" => Ok(Provenance::CvRelative),
            "hybrid" => Ok(Provenance::Hybrid),
            other => Err(Error::Config(format!("unknown provenance {other:?}"))),
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A dense matrix of row vectors keyed by item id, all rows finite and of
/// equal dimension. Row order is part of the store's identity.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    dim: usize,
    provenance: Provenance,
}

impl EmbeddingStore {
    pub fn new(
        ids: Vec<String>,
        rows: Vec<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::Invalid(format!(
                "{} ids but {} rows",
                ids.len(),
                rows.len()
            )));
        }
        let dim = rows.first().map_or(0, Vec::len);
        let mut index = HashMap::with_capacity(ids.len());
        let mut data = Vec::with_capacity(ids.len() * dim);
        for (i, (id, row)) in ids.iter().zip(&rows).enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate id {id:?}")));
            }
            if row.len() != dim {
                return Err(Error::DimMismatch(format!(
                    "row {id:?} has dim {}, expected {dim}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Invalid(format!("row {id:?} contains {bad}")));
            }
            data.extend_from_slice(row);
        }
        Ok(EmbeddingStore {
            ids,
            index,
            data,
            dim,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.index.get(id).map(|&i| self.row(i))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), self.row(i)))
    }

    /// `id<TAB>f1<TAB>...<TAB>fd` lines, floats in shortest round-trip form.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (id, row) in self.iter() {
            out.push_str(id);
            for v in row {
                out.push('\t');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parse a TSV store. Zero-norm rows are rejected here: every consumer
    /// of a loaded store computes cosines, which a zero vector breaks.
    pub fn from_tsv(text: &str, provenance: Provenance) -> Result<Self> {
        let mut ids = Vec::new();
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            let id = parts
                .next()
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::Parse {
                    line: i + 1,
                    col: 1,
                    msg: "missing id".into(),
                })?;
            let row: Vec<f64> = parts
                .enumerate()
                .map(|(j, v)| {
                    v.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 1,
                        col: j + 2,
                        msg: format!("bad float {v:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            if row.iter().all(|v| *v == 0.0) {
                return Err(Error::Invalid(format!(
                    "row {id:?} has zero norm; cosine similarity would be undefined"
                )));
            }
            ids.push(id.to_string());
            rows.push(row);
        }
        EmbeddingStore::new(ids, rows, provenance)
    }

    pub fn save_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn load_tsv(path: impl AsRef<Path>, provenance: Provenance) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        EmbeddingStore::from_tsv(&text, provenance)
    }

    /// Restrict to `wanted` ids, in the given order.
    pub fn select(&self, wanted: &[String]) -> Result<EmbeddingStore> {
        let rows: Vec<Vec<f64>> = wanted
            .iter()
            .map(|id| {
                self.get(id).map(<[f64]>::to_vec).ok_or(Error::UnknownId {
                    kind: "item",
                    id: id.clone(),
                })
            })
            .collect::<Result<_>>()?;
        EmbeddingStore::new(wanted.to_vec(), rows, self.provenance)
    }
}
