//! Detector-label to ConceptNet alignment table.

use crate::error::{Error, Result};
use crate::kg::Iri;
use std::collections::BTreeMap;

/// Lookup from `(unit, detector label)` to the concept IRI that types the
/// annotation. Labels missing from the table are not an error; callers fall
/// back to an `unaligned/` IRI so ingestion never blocks on vocabulary drift.
#[derive(Debug, Clone)]
pub struct AlignmentTable {
    entries: BTreeMap<(String, String), Iri>,
}

impl AlignmentTable {
    /// The table bundled with the crate, covering the stock detector
    /// vocabularies (COCO objects, activity labels, age tiers, art styles,
    /// emotion categories, human presence, CSS3 color names).
    pub fn bundled() -> Self {
        AlignmentTable::parse(include_str!("../../data/conceptnet_alignment.tsv"))
            .expect("bundled alignment table is well-formed")
    }

    /// Parse `unit<TAB>label<TAB>iri` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let bad = |msg: String| Error::Parse {
                line: i + 1,
                col: 1,
                msg,
            };
            let unit = parts
                .next()
                .ok_or_else(|| bad("missing unit".into()))?
                .to_string();
            let label = parts
                .next()
                .ok_or_else(|| bad("missing label".into()))?
                .to_string();
            let iri = parts
                .next()
                .ok_or_else(|| bad("missing IRI".into()))
                .and_then(|v| Iri::new(v).map_err(|e| bad(e.to_string())))?;
            entries.insert((unit, label), iri);
        }
        Ok(AlignmentTable { entries })
    }

    pub fn concept_for(&self, unit: &str, label: &str) -> Option<&Iri> {
        self.entries.get(&(unit.to_string(), label.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_loads() {
        let table = AlignmentTable::bundled();
        assert!(table.len() > 200);
        assert_eq!(
            table.concept_for("objects", "dog").unwrap().as_str(),
            "http://conceptnet.io/c/en/dog"
        );
        assert_eq!(
            table.concept_for("objects", "sports ball").unwrap().as_str(),
            "http://conceptnet.io/c/en/sports_ball"
        );
        // "something else" is deliberately unaligned.
        assert!(table.concept_for("emotion", "something else").is_none());
    }
}
